//! Adaptive Simpson quadrature with a Richardson-extrapolated local rule.
//!
//! Each panel compares Simpson on the whole panel against Simpson on its two
//! halves; the difference over 15 is both the error estimate and the
//! correction added to the refined value, so the accepted local rule is
//! fifth order (exact for quintics).

use serde::Serialize;

use crate::error::{domain, Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const MAX_DEPTH: u32 = 40;
/// Panels are always split at least this many times.
const MIN_DEPTH: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    /// `false` when some panel hit [`MAX_DEPTH`] before meeting its tolerance.
    pub converged: bool,
}

struct Panel {
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
}

struct Walk<F> {
    g: F,
    evaluations: usize,
    error: f64,
    converged: bool,
}

impl<F: FnMut(f64) -> Result<f64>> Walk<F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evaluations += 1;
        let y = (self.g)(x)?;
        if !y.is_finite() {
            return Err(Error::Eval(format!("integrand is not finite at {x}: {y}")));
        }
        Ok(y)
    }

    fn panel(&mut self, p: Panel, tol: f64, depth: u32) -> Result<f64> {
        let lm = 0.5 * (p.a + p.m);
        let rm = 0.5 * (p.m + p.b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        let accept = depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol;
        if accept || depth >= MAX_DEPTH {
            if !accept {
                self.converged = false;
            }
            self.error += delta.abs() / 15.0;
            return Ok(left + right + delta / 15.0);
        }
        let l = self.panel(
            Panel { a: p.a, fa: p.fa, m: lm, fm: flm, b: p.m, fb: p.fm, whole: left },
            0.5 * tol,
            depth + 1,
        )?;
        let r = self.panel(
            Panel { a: p.m, fa: p.fm, m: rm, fm: frm, b: p.b, fb: p.fb, whole: right },
            0.5 * tol,
            depth + 1,
        )?;
        Ok(l + r)
    }
}

/// Integrates `g` over `[lo, hi]` to `max(rel_tol·|value|, abs_tol)`.
///
/// Hitting the depth limit is not an error: the best estimate comes back with
/// `converged == false`. Errors from `g` abort the integration.
pub fn integrate<F>(g: F, lo: f64, hi: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(domain(format!("integration needs finite lo < hi, got [{lo}, {hi}]")));
    }
    if !(rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(domain("quadrature tolerances must be positive"));
    }
    let mut walk = Walk { g, evaluations: 0, error: 0.0, converged: true };
    let m = 0.5 * (lo + hi);
    let flo = walk.eval(lo)?;
    let fm = walk.eval(m)?;
    let fhi = walk.eval(hi)?;
    let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    let tol = (rel_tol * whole.abs()).max(abs_tol);
    let value = walk.panel(
        Panel { a: lo, fa: flo, m, fm, b: hi, fb: fhi, whole },
        tol,
        0,
    )?;
    let requested = (rel_tol * value.abs()).max(abs_tol);
    Ok(QuadResult {
        value,
        abs_error_estimate: walk.error,
        evaluations: walk.evaluations,
        converged: walk.converged && walk.error <= requested,
    })
}

/// [`integrate`] at the default tolerances.
pub fn integrate_default<F>(g: F, lo: f64, hi: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate(g, lo, hi, DEFAULT_REL_TOL, DEFAULT_ABS_TOL)
}

/// Integrates an infallible integrand; convenience for oracles and tests.
pub fn integrate_plain<F>(mut g: F, lo: f64, hi: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| Ok(g(x)), lo, hi, rel_tol, abs_tol)
}
