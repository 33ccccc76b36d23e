//! The trapezoid defect, the integral identity behind it, and the four
//! closed-form upper bounds together with a per-theorem verdict.
//!
//! Every bound has the shape `((b − a)/4) · |f'(a) f'(b)|^(s/2) · K` where
//! `K` combines the kernels `g1`/`g2` at `alpha(±e, ±e)` for a
//! theorem-specific exponent `e`:
//!
//! | theorem | hypothesis on | extra parameters |
//! |---------|---------------|------------------|
//! | `t1`    | `|f'|`        | none             |
//! | `t2`    | `|f'|^q`      | `p > 1`, `q = p/(p − 1)` |
//! | `t3`    | `|f'|^q`      | `q >= 1`         |
//! | `t4`    | `|f'|`        | `mu1, mu2 ∈ (0, 1)` |
//!
//! Kernel arguments are handled as logarithms throughout; see
//! [`crate::kernel`].

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::certify::{
    check_monotone_decreasing, check_range_unit, check_s_geometric_convexity, SampledCertificate,
    DEFAULT_GRID_1D, DEFAULT_GRID_3D, SLACK,
};
use crate::error::{domain, input, Result};
use crate::funcspec::FunctionSpec;
use crate::kernel::{exp_checked, g1_ln, g2_ln, ln_alpha, ln_g1_ln, ln_g2_ln, EndpointDerivatives};
use crate::quadrature::{integrate, DEFAULT_ABS_TOL, DEFAULT_REL_TOL};

/// Below this `|ln alpha|` powered kernel terms are evaluated directly;
/// above it they go through `ln g`.
const DIRECT_LOG_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    T1,
    T2,
    T3,
    T4,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::T1, Theorem::T2, Theorem::T3, Theorem::T4];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::T1 => "t1",
            Theorem::T2 => "t2",
            Theorem::T3 => "t3",
            Theorem::T4 => "t4",
        }
    }
}

impl std::str::FromStr for Theorem {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" => Ok(Theorem::T1),
            "t2" => Ok(Theorem::T2),
            "t3" => Ok(Theorem::T3),
            "t4" => Ok(Theorem::T4),
            other => Err(input(format!("unknown theorem {other:?}, expected t1..t4"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Bounds are reported only when all sampled hypotheses pass.
    #[default]
    Strict,
    /// Bounds are reported unconditionally.
    PaperCompat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `|f'| <= 1` at every sample.
    UnitRange,
    /// `|f'| > 1` at every sample.
    AboveUnit,
    Mixed,
}

/// Parameters shared by the four bounds. `q` is the free exponent of `t3`;
/// `t2` always uses the conjugate of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mode: Mode,
}

impl ParamSet {
    /// `p = 2`, `q = 2`, `mu1 = mu2 = 1/2`, strict mode.
    pub fn new(s: f64) -> Self {
        Self { s, p: 2.0, q: 2.0, mu1: 0.5, mu2: 0.5, mode: Mode::Strict }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// `p/(p − 1)`.
    pub fn conjugate_q(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn validate(&self) -> Result<()> {
        check_s(self.s)?;
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(input(format!("p must be a finite number > 1, got {}", self.p)));
        }
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return Err(input(format!("q must be a finite number >= 1, got {}", self.q)));
        }
        for (name, mu) in [("mu1", self.mu1), ("mu2", self.mu2)] {
            if !(mu > 0.0 && mu < 1.0) {
                return Err(input(format!("{name} must lie strictly inside (0, 1), got {mu}")));
            }
        }
        Ok(())
    }
}

pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(input(format!("s must lie in (0, 1], got {s}")));
    }
    Ok(())
}

pub(crate) fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(input(format!("endpoints must be positive and finite, got a = {a}, b = {b}")));
    }
    if a >= b {
        return Err(input(format!("need a < b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Signed trapezoid defect `(f(a) + f(b))/2 − (1/(b − a))∫_a^b f`.
///
/// With a primitive it integrates the chord-minus-function gap, which stays
/// small where the defect is small. Without one it uses the derivative form
/// of the same quantity (see [`lemma_rhs`]).
pub fn trapezoid_defect(fs: &FunctionSpec, a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    if !fs.has_f() {
        return lemma_rhs(fs, a, b, DEFAULT_REL_TOL, DEFAULT_ABS_TOL);
    }
    let fa = fs.f(a)?;
    let fb = fs.f(b)?;
    let width = b - a;
    let slope = (fb - fa) / width;
    let gap = integrate(
        |x| Ok(fa + slope * (x - a) - fs.f(x)?),
        a,
        b,
        DEFAULT_REL_TOL,
        DEFAULT_ABS_TOL * width,
    )?;
    Ok(gap.value / width)
}

/// `|(f(a) + f(b))/2 − (1/(b − a))∫_a^b f(x) dx|`.
pub fn hh_lhs(fs: &FunctionSpec, a: f64, b: f64) -> Result<f64> {
    trapezoid_defect(fs, a, b).map(f64::abs)
}

/// `((b − a)/4)·[∫₀¹ (−t) f'((1+t)a/2 + (1−t)b/2) dt + ∫₀¹ t f'((1+t)b/2 + (1−t)a/2) dt]`.
pub fn lemma_rhs(fs: &FunctionSpec, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    check_interval(a, b)?;
    let near_a = integrate(
        |t| Ok(-t * fs.fprime((1.0 + t) / 2.0 * a + (1.0 - t) / 2.0 * b)?),
        0.0,
        1.0,
        rel_tol,
        abs_tol,
    )?;
    let near_b = integrate(
        |t| Ok(t * fs.fprime((1.0 + t) / 2.0 * b + (1.0 - t) / 2.0 * a)?),
        0.0,
        1.0,
        rel_tol,
        abs_tol,
    )?;
    Ok((b - a) / 4.0 * (near_a.value + near_b.value))
}

/// `|defect − lemma_rhs|`: small exactly when `f'` is the derivative of `f`.
pub fn lemma1_residual(fs: &FunctionSpec, a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    if !fs.has_f() {
        return Err(input("the identity residual needs an expression for f"));
    }
    let fa = fs.f(a)?;
    let fb = fs.f(b)?;
    let integral = integrate(|x| fs.f(x), a, b, 1e-12, 1e-14)?;
    let lhs = (fa + fb) / 2.0 - integral.value / (b - a);
    let rhs = lemma_rhs(fs, a, b, 1e-12, 1e-14)?;
    Ok((lhs - rhs).abs())
}

fn check_bound_inputs(s: f64, a: f64, b: f64) -> Result<()> {
    check_interval(a, b)?;
    check_s(s)
}

/// `g^(1/q)` for `g = g2(e^x)`.
fn g2_root(x: f64, q: f64) -> Result<f64> {
    if x <= DIRECT_LOG_LIMIT {
        Ok(g2_ln(x)?.powf(1.0 / q))
    } else {
        exp_checked(ln_g2_ln(x)? / q)
    }
}

/// `ratio · (1/2)^(1 − 1/q) · g1(e^x)^(1/q)`, arranged as
/// `ratio · (1/2) · (2·g1)^(1/q)` so that `g1 = 1/2` gives exactly `ratio/2`.
fn t3_term(ln_ratio: f64, x: f64, q: f64) -> Result<f64> {
    if x.abs() <= DIRECT_LOG_LIMIT {
        let ratio = exp_checked(ln_ratio)?;
        Ok(ratio * 0.5 * (2.0 * g1_ln(x)?).powf(1.0 / q))
    } else {
        exp_checked(ln_ratio - LN_2 + (LN_2 + ln_g1_ln(x)?) / q)
    }
}

/// `((b−a)/4)·|f'(a)f'(b)|^(s/2)·(g1(alpha(s/2, s/2)) + g1(alpha(−s/2, −s/2)))`.
pub fn bound_t1(d: &EndpointDerivatives, s: f64, a: f64, b: f64) -> Result<f64> {
    check_bound_inputs(s, a, b)?;
    let h = s / 2.0;
    let kernels = g1_ln(ln_alpha(d, h, h))? + g1_ln(ln_alpha(d, -h, -h))?;
    Ok((b - a) / 4.0 * d.product_pow(h)? * kernels)
}

/// `((b−a)/(4(p+1)^(1/p)))·|f'(a)f'(b)|^(s/2)·{g2(alpha(sq/2, sq/2))^(1/q) + g2(alpha(−sq/2, −sq/2))^(1/q)}`
/// with `q = p/(p − 1)`.
pub fn bound_t2(d: &EndpointDerivatives, s: f64, p: f64, a: f64, b: f64) -> Result<f64> {
    check_bound_inputs(s, a, b)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain(format!("p must be a finite number > 1, got {p}")));
    }
    let q = conjugate(p);
    let e = s * q / 2.0;
    let kernels = g2_root(ln_alpha(d, e, e), q)? + g2_root(ln_alpha(d, -e, -e), q)?;
    let prefactor = (b - a) / (4.0 * (p + 1.0).powf(1.0 / p));
    Ok(prefactor * d.product_pow(s / 2.0)? * kernels)
}

/// `((b−a)/4)·(1/2)^(1−1/q)·{|f'(a)/f'(b)|^(s/2)·g1(alpha(sq/2, sq/2))^(1/q) + |f'(b)/f'(a)|^(s/2)·g1(alpha(−sq/2, −sq/2))^(1/q)}`.
///
/// The endpoint factors are the ratios `|f'(a)/f'(b)|^(s/2)` and their
/// inverse, not the product `|f'(a)f'(b)|^(s/2)` used by the other bounds;
/// for `q = 1` this coincides with [`bound_t1`] only when
/// `|f'(a)| = |f'(b)| = 1`.
pub fn bound_t3(d: &EndpointDerivatives, s: f64, q: f64, a: f64, b: f64) -> Result<f64> {
    check_bound_inputs(s, a, b)?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(domain(format!("q must be a finite number >= 1, got {q}")));
    }
    let ln_ratio = (s / 2.0) * (d.fa_abs().ln() - d.fb_abs().ln());
    let e = s * q / 2.0;
    let braces = t3_term(ln_ratio, ln_alpha(d, e, e), q)? + t3_term(-ln_ratio, ln_alpha(d, -e, -e), q)?;
    Ok((b - a) / 4.0 * braces)
}

/// `((1 + mu2) mu1² + (1 + mu1) mu2²) / ((1 + mu1)(1 + mu2))`.
pub fn young_constant(mu1: f64, mu2: f64) -> f64 {
    ((1.0 + mu2) * mu1 * mu1 + (1.0 + mu1) * mu2 * mu2) / ((1.0 + mu1) * (1.0 + mu2))
}

/// `((b−a)/4)·|f'(a)f'(b)|^(s/2)·{young(mu1, mu2) + eta1·g2(alpha(s/(2 eta1), s/(2 eta1))) + eta2·g2(alpha(s/(2 eta2), s/(2 eta2)))}`
/// with `eta_i = 1 − mu_i`. Both kernel terms use `alpha` with positive
/// exponents. Small `eta` with `|f'(a)| > |f'(b)|` can overflow `g2`; that
/// surfaces as [`crate::Error::Overflow`].
pub fn bound_t4(d: &EndpointDerivatives, s: f64, mu1: f64, mu2: f64, a: f64, b: f64) -> Result<f64> {
    check_bound_inputs(s, a, b)?;
    for (name, mu) in [("mu1", mu1), ("mu2", mu2)] {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(domain(format!("{name} must lie strictly inside (0, 1), got {mu}")));
        }
    }
    let term = |mu: f64| -> Result<f64> {
        let eta = 1.0 - mu;
        let e = s / (2.0 * eta);
        Ok(eta * g2_ln(ln_alpha(d, e, e))?)
    };
    let braces = young_constant(mu1, mu2) + term(mu1)? + term(mu2)?;
    Ok((b - a) / 4.0 * d.product_pow(s / 2.0)? * braces)
}

/// Evaluates one bound with the parameters it uses from `params`.
pub fn bound(theorem: Theorem, d: &EndpointDerivatives, params: &ParamSet, a: f64, b: f64) -> Result<f64> {
    match theorem {
        Theorem::T1 => bound_t1(d, params.s, a, b),
        Theorem::T2 => bound_t2(d, params.s, params.p, a, b),
        Theorem::T3 => bound_t3(d, params.s, params.q, a, b),
        Theorem::T4 => bound_t4(d, params.s, params.mu1, params.mu2, a, b),
    }
}

/// Grid sizes for the hypothesis certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grids {
    pub grid_1d: usize,
    pub grid_3d: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Self { grid_1d: DEFAULT_GRID_1D, grid_3d: DEFAULT_GRID_3D }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub label: String,
    pub a: f64,
    pub b: f64,
    pub fa_abs: f64,
    pub fb_abs: f64,
    pub params: ParamSet,
    pub mode: Mode,
    pub regime: Regime,
    pub lhs: f64,
    pub rhs_by_theorem: BTreeMap<Theorem, f64>,
    pub margins: BTreeMap<Theorem, f64>,
    pub hypothesis_verdicts: BTreeMap<String, SampledCertificate>,
    /// Failed hypothesis names per theorem (in either mode).
    pub rejected: BTreeMap<Theorem, Vec<String>>,
}

impl BoundReport {
    /// Replaces one right-hand side and its margin.
    pub fn set_rhs(&mut self, theorem: Theorem, rhs: f64) {
        self.rhs_by_theorem.insert(theorem, rhs);
        self.margins.insert(theorem, rhs - self.lhs);
    }

    pub fn min_margin(&self) -> Option<f64> {
        self.margins.values().copied().reduce(f64::min)
    }

    /// Theorems whose reported margin is below `-SLACK`.
    pub fn violations(&self) -> Vec<Theorem> {
        self.margins
            .iter()
            .filter(|(_, m)| **m < -SLACK)
            .map(|(t, _)| *t)
            .collect()
    }

    pub fn certified(&self, theorem: Theorem) -> bool {
        self.rejected.get(&theorem).is_none_or(Vec::is_empty)
    }
}

fn hypothesis_names(theorem: Theorem) -> [&'static str; 3] {
    match theorem {
        Theorem::T1 | Theorem::T4 => ["range_unit_interval", "monotone_decreasing", "s_geometrically_convex"],
        Theorem::T2 => ["range_unit_interval", "monotone_decreasing_pow_q2", "s_geometrically_convex_pow_q2"],
        Theorem::T3 => ["range_unit_interval", "monotone_decreasing_pow_q3", "s_geometrically_convex_pow_q3"],
    }
}

/// Classifies `|f'|` on a uniform grid.
pub fn regime(fs: &FunctionSpec, a: f64, b: f64, n: usize) -> Result<Regime> {
    let mut below = false;
    let mut above = false;
    for x in crate::certify::grid(a, b, n.max(2)) {
        if fs.abs_fprime(x)? <= 1.0 + SLACK {
            below = true;
        } else {
            above = true;
        }
    }
    Ok(match (below, above) {
        (true, false) => Regime::UnitRange,
        (false, true) => Regime::AboveUnit,
        _ => Regime::Mixed,
    })
}

/// [`verdict_with`] at the default grid sizes.
pub fn verdict(fs: &FunctionSpec, params: &ParamSet, a: f64, b: f64) -> Result<BoundReport> {
    verdict_with(fs, params, a, b, Grids::default())
}

/// Certifies the hypotheses each bound needs, evaluates the bounds and
/// assembles the report. In strict mode a bound is reported only when all
/// of its hypotheses pass; in compatibility mode every bound is reported.
pub fn verdict_with(fs: &FunctionSpec, params: &ParamSet, a: f64, b: f64, grids: Grids) -> Result<BoundReport> {
    params.validate()?;
    check_interval(a, b)?;
    let d = EndpointDerivatives::new(fs.abs_fprime(a)?, fs.abs_fprime(b)?)
        .map_err(|e| input(format!("endpoint derivatives: {e}")))?;
    let lhs = hh_lhs(fs, a, b)?;
    let regime = regime(fs, a, b, grids.grid_1d)?;

    let abs_fp = |x: f64| fs.abs_fprime(x);
    let (n1, n3, s) = (grids.grid_1d, grids.grid_3d, params.s);
    let mut hyps = BTreeMap::new();
    hyps.insert("range_unit_interval".to_owned(), check_range_unit(abs_fp, a, b, n1)?);
    hyps.insert("monotone_decreasing".to_owned(), check_monotone_decreasing(abs_fp, a, b, n1)?);
    hyps.insert("s_geometrically_convex".to_owned(), check_s_geometric_convexity(abs_fp, a, b, s, n3)?);
    for (suffix, q) in [("q2", params.conjugate_q()), ("q3", params.q)] {
        let pow_q = move |x: f64| fs.abs_fprime(x).map(|v| v.powf(q));
        hyps.insert(format!("monotone_decreasing_pow_{suffix}"), check_monotone_decreasing(pow_q, a, b, n1)?);
        hyps.insert(
            format!("s_geometrically_convex_pow_{suffix}"),
            check_s_geometric_convexity(pow_q, a, b, s, n3)?,
        );
    }

    let mut report = BoundReport {
        label: fs.label().to_owned(),
        a,
        b,
        fa_abs: d.fa_abs(),
        fb_abs: d.fb_abs(),
        params: *params,
        mode: params.mode,
        regime,
        lhs,
        rhs_by_theorem: BTreeMap::new(),
        margins: BTreeMap::new(),
        hypothesis_verdicts: BTreeMap::new(),
        rejected: BTreeMap::new(),
    };
    for theorem in Theorem::ALL {
        let failed: Vec<String> = hypothesis_names(theorem)
            .iter()
            .filter(|name| !hyps[**name].passed())
            .map(|name| (*name).to_owned())
            .collect();
        let emit = params.mode == Mode::PaperCompat || failed.is_empty();
        report.rejected.insert(theorem, failed);
        if emit {
            let rhs = bound(theorem, &d, params, a, b)?;
            report.set_rhs(theorem, rhs);
        }
    }
    report.hypothesis_verdicts = hyps;
    Ok(report)
}
