//! Minimizes the bounds with free parameters and ranks all four bounds.
//!
//! `t2` is tuned over `ln p` by a coarse scan followed by golden-section
//! search; `t4` over `(mu1, mu2) ∈ [δ, 1 − δ]²` by a coarse grid followed by
//! per-coordinate golden-section refinement. Evaluation failures (overflow
//! near the domain edges) score `+inf`.

use serde::Serialize;

use crate::bounds::{bound_t1, bound_t2, bound_t3, bound_t4, Theorem};
use crate::certify::grid;
use crate::error::{domain, Error, Result};
use crate::funcspec::FunctionSpec;
use crate::kernel::{g2_ln, ln_alpha, EndpointDerivatives};

/// Distance kept from the open ends of `(0, 1)` when tuning `mu`.
pub const MU_DELTA: f64 = 1e-3;
pub const P_MIN: f64 = 1.0 + 1e-4;
pub const P_MAX: f64 = 1e3;
/// Distance in `ln p` below which a tuned `p` is flagged as a boundary hit.
pub const P_DELTA: f64 = 1e-3;
pub const GOLDEN_REL_WIDTH: f64 = 1e-10;
pub const COARSE_P: usize = 64;
pub const COARSE_MU: usize = 64;
/// Exponents tried for `t3` in [`tightness_rank`].
pub const T3_Q_SET: [f64; 3] = [1.0, 2.0, 10.0];

const MAX_GOLDEN_ITERS: usize = 200;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    pub theorem: Theorem,
    pub param_names: Vec<String>,
    pub best_params: Vec<f64>,
    pub best_bound: f64,
    pub at_boundary: Vec<bool>,
    /// Objective evaluations spent in golden-section refinement.
    pub iterations: usize,
    /// Successive golden-section brackets, in search coordinates.
    pub bracket_history: Vec<[f64; 2]>,
}

struct Golden {
    x: f64,
    fx: f64,
    iterations: usize,
}

/// Golden-section search on `[lo, hi]`; the endpoints are candidates too,
/// so a monotone objective returns the better endpoint exactly.
fn golden<F>(f: F, lo: f64, hi: f64, history: &mut Vec<[f64; 2]>) -> Golden
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = f(lo);
    let f_hi = f(hi);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 4;
    history.push([lo, hi]);
    while hi - lo > GOLDEN_REL_WIDTH * lo.abs().max(hi.abs()) && iterations < MAX_GOLDEN_ITERS {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        iterations += 1;
        history.push([lo, hi]);
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for (x, fx) in [(history[0][0], f_lo), (history[0][1], f_hi)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    Golden { x: best.0, fx: best.1, iterations }
}

fn score(v: Result<f64>) -> f64 {
    match v {
        Ok(v) if v.is_finite() => v,
        _ => f64::INFINITY,
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn no_finite_value(what: &str) -> Error {
    domain(format!("{what}: the bound is not finite anywhere on the search grid"))
}

/// Minimizes [`bound_t2`] over `p ∈ [P_MIN, P_MAX]`.
pub fn tune_p(d: &EndpointDerivatives, s: f64, a: f64, b: f64) -> Result<TuneResult> {
    bound_t2(d, s, 2.0, a, b)?;
    let objective = |ln_p: f64| score(bound_t2(d, s, ln_p.exp(), a, b));
    let (lo, hi) = (P_MIN.ln(), P_MAX.ln());
    let xs = grid(lo, hi, COARSE_P);
    let ys: Vec<f64> = xs.iter().map(|x| objective(*x)).collect();
    let i = argmin(&ys);
    if !ys[i].is_finite() {
        return Err(no_finite_value("tune_p"));
    }
    let mut history = Vec::new();
    let g = golden(objective, xs[i.saturating_sub(1)], xs[(i + 1).min(COARSE_P - 1)], &mut history);

    let mut best_ln_p = xs[i];
    let mut best = ys[i];
    if g.fx < best {
        best_ln_p = g.x;
        best = g.fx;
    }
    let ln2 = 2f64.ln();
    if objective(ln2) < best {
        best_ln_p = ln2;
    }
    let p = if best_ln_p == ln2 { 2.0 } else { best_ln_p.exp() };
    Ok(TuneResult {
        theorem: Theorem::T2,
        param_names: vec!["p".to_owned()],
        best_params: vec![p],
        best_bound: bound_t2(d, s, p, a, b)?,
        at_boundary: vec![best_ln_p - lo <= P_DELTA || hi - best_ln_p <= P_DELTA],
        iterations: g.iterations,
        bracket_history: history,
    })
}

/// Minimizes [`bound_t4`] over `(mu1, mu2) ∈ [MU_DELTA, 1 − MU_DELTA]²`.
///
/// The braces split as `h(mu1) + h(mu2)` with
/// `h(mu) = mu²/(1 + mu) + (1 − mu)·g2(alpha(s/(2(1 − mu)), s/(2(1 − mu))))`,
/// so both phases score that sum and both coordinates share one refinement.
pub fn tune_mu(d: &EndpointDerivatives, s: f64, a: f64, b: f64) -> Result<TuneResult> {
    bound_t4(d, s, 0.5, 0.5, a, b)?;
    let h = |mu: f64| {
        let eta = 1.0 - mu;
        let e = s / (2.0 * eta);
        score(g2_ln(ln_alpha(d, e, e)).map(|g| mu * mu / (1.0 + mu) + eta * g))
    };
    let (lo, hi) = (MU_DELTA, 1.0 - MU_DELTA);
    let mus = grid(lo, hi, COARSE_MU);
    let hs: Vec<f64> = mus.iter().map(|m| h(*m)).collect();
    let mut coarse = (0, 0);
    let mut coarse_val = f64::INFINITY;
    for i in 0..COARSE_MU {
        for j in 0..COARSE_MU {
            let v = hs[i] + hs[j];
            if v < coarse_val {
                coarse = (i, j);
                coarse_val = v;
            }
        }
    }
    if !coarse_val.is_finite() {
        return Err(no_finite_value("tune_mu"));
    }

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut refine = |i: usize| {
        let g = golden(h, mus[i.saturating_sub(1)], mus[(i + 1).min(COARSE_MU - 1)], &mut history);
        iterations += g.iterations;
        if g.fx < hs[i] {
            g.x
        } else {
            mus[i]
        }
    };
    let mut mu1 = refine(coarse.0);
    let mut mu2 = if coarse.1 == coarse.0 { mu1 } else { refine(coarse.1) };
    if h(0.5) + h(0.5) < h(mu1) + h(mu2) {
        (mu1, mu2) = (0.5, 0.5);
    }
    let near_edge = |mu: f64| mu - lo <= MU_DELTA || hi - mu <= MU_DELTA;
    Ok(TuneResult {
        theorem: Theorem::T4,
        param_names: vec!["mu1".to_owned(), "mu2".to_owned()],
        best_params: vec![mu1, mu2],
        best_bound: bound_t4(d, s, mu1, mu2, a, b)?,
        at_boundary: vec![near_edge(mu1), near_edge(mu2)],
        iterations,
        bracket_history: history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankEntry {
    pub theorem: Theorem,
    pub bound: f64,
    /// The free parameters used: `[]`, `[p]`, `[q]` or `[mu1, mu2]`.
    pub params: Vec<f64>,
}

/// All four bounds at their best parameters (tuned `p` and `mu`, best `q`
/// from [`T3_Q_SET`]), ascending, ties broken by theorem number.
pub fn tightness_rank(fs: &FunctionSpec, s: f64, a: f64, b: f64) -> Result<Vec<RankEntry>> {
    let d = EndpointDerivatives::new(fs.abs_fprime(a)?, fs.abs_fprime(b)?)?;
    tightness_rank_for(&d, s, a, b)
}

/// [`tightness_rank`] from endpoint derivatives.
pub fn tightness_rank_for(d: &EndpointDerivatives, s: f64, a: f64, b: f64) -> Result<Vec<RankEntry>> {
    let mut out = vec![RankEntry { theorem: Theorem::T1, bound: bound_t1(d, s, a, b)?, params: vec![] }];
    let t2 = tune_p(d, s, a, b)?;
    out.push(RankEntry { theorem: Theorem::T2, bound: t2.best_bound, params: t2.best_params });
    let mut t3 = RankEntry { theorem: Theorem::T3, bound: f64::INFINITY, params: vec![] };
    for q in T3_Q_SET {
        let v = bound_t3(d, s, q, a, b)?;
        if v < t3.bound {
            t3.bound = v;
            t3.params = vec![q];
        }
    }
    out.push(t3);
    let t4 = tune_mu(d, s, a, b)?;
    out.push(RankEntry { theorem: Theorem::T4, bound: t4.best_bound, params: t4.best_params });
    out.sort_by(|x, y| x.bound.total_cmp(&y.bound).then(x.theorem.cmp(&y.theorem)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let mut h = Vec::new();
        let g = golden(|x| (x - 0.3).powi(2), 0.0, 1.0, &mut h);
        assert!((g.x - 0.3).abs() < 1e-8);
        assert!(h.windows(2).all(|w| w[1][1] - w[1][0] < w[0][1] - w[0][0]));
        let g = golden(|x| -x, 0.0, 1.0, &mut Vec::new());
        assert_eq!(g.x, 1.0);
    }

    #[test]
    fn unit_derivatives_push_p_to_the_lower_edge() {
        let r = tune_p(&EndpointDerivatives::unit(), 0.5, 0.2, 0.6).unwrap();
        assert!(r.at_boundary[0]);
        assert!((r.best_params[0] - P_MIN).abs() < 1e-6);
        assert!(r.best_bound <= bound_t2(&EndpointDerivatives::unit(), 0.5, 2.0, 0.2, 0.6).unwrap());
    }

    #[test]
    fn unit_derivatives_push_mu_to_the_upper_edge() {
        let r = tune_mu(&EndpointDerivatives::unit(), 0.5, 0.2, 0.6).unwrap();
        assert_eq!(r.best_params, vec![1.0 - MU_DELTA, 1.0 - MU_DELTA]);
        assert_eq!(r.at_boundary, vec![true, true]);
    }

    #[test]
    fn interior_mu_is_symmetric() {
        let d = EndpointDerivatives::new(0.9, 0.05).unwrap();
        let r = tune_mu(&d, 0.8, 0.1, 0.9).unwrap();
        assert_eq!(r.best_params[0], r.best_params[1]);
        assert!(r.best_bound <= bound_t4(&d, 0.8, 0.5, 0.5, 0.1, 0.9).unwrap() + 1e-12);
        let again = tune_mu(&d, 0.8, 0.1, 0.9).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn rank_breaks_ties_by_theorem() {
        let fs = FunctionSpec::from_exprs(None, "1").unwrap();
        let rank = tightness_rank(&fs, 0.5, 0.2, 0.6).unwrap();
        let order: Vec<Theorem> = rank.iter().map(|e| e.theorem).collect();
        let i1 = order.iter().position(|t| *t == Theorem::T1).unwrap();
        let i3 = order.iter().position(|t| *t == Theorem::T3).unwrap();
        assert_eq!(i3, i1 + 1);
        assert_eq!(rank[i1].bound, rank[i3].bound);
        assert!(rank.windows(2).all(|w| w[0].bound <= w[1].bound));
    }
}
