//! The bounds specialized to `f(x) = x^s/s` on `(0, 1]`, where
//! `|f'(x)| = x^(s−1)` and the defect is a gap between special means.

use serde::Serialize;

use crate::bounds::{bound_t1, bound_t2, bound_t3, bound_t4, conjugate, young_constant};
use crate::error::{domain, Error, Result};
use crate::kernel::{g1, mean, EndpointDerivatives, MeanKind};

fn check(s: f64, a: f64, b: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(domain(format!("need 0 < s < 1, got s = {s}")));
    }
    if !(a > 0.0 && a < b && b <= 1.0) {
        return Err(domain(format!("need 0 < a < b <= 1, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// `(a^(s−1), b^(s−1))`.
pub fn power_derivatives(s: f64, a: f64, b: f64) -> Result<EndpointDerivatives> {
    EndpointDerivatives::new(a.powf(s - 1.0), b.powf(s - 1.0))
}

/// `(1/s)|A(a^s, b^s) − L_s(a, b)^s|`.
///
/// With `m = (a + b)/2` and `r = (b − a)/(b + a)` the difference expands as
/// `m^s Σ_{k>=1} C(s, 2k)·r^(2k)·2k/(2k + 1)`, whose terms share one sign;
/// the series is used for `r < 1/2` and the two means are subtracted
/// directly otherwise.
pub fn prop_lhs(s: f64, a: f64, b: f64) -> Result<f64> {
    check(s, a, b)?;
    let r = (b - a) / (b + a);
    if r < 0.5 {
        let r2 = r * r;
        let mut binom = 1.0;
        let mut power = 1.0;
        let mut sum = 0.0;
        for k in 1..=40 {
            let n = 2.0 * k as f64;
            binom *= (s - n + 2.0) * (s - n + 1.0) / ((n - 1.0) * n);
            power *= r2;
            let term = binom * power * n / (n + 1.0);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        return Ok(((a + b) / 2.0).powf(s) * sum.abs() / s);
    }
    let arith = mean(MeanKind::Arithmetic, a.powf(s), b.powf(s))?;
    let gen_log = (b.powf(s + 1.0) - a.powf(s + 1.0)) / ((s + 1.0) * (b - a));
    Ok((arith - gen_log).abs() / s)
}

pub fn prop1_rhs(s: f64, a: f64, b: f64) -> Result<f64> {
    check(s, a, b)?;
    bound_t1(&power_derivatives(s, a, b)?, s, a, b)
}

pub fn prop2_rhs(s: f64, p: f64, a: f64, b: f64) -> Result<f64> {
    check(s, a, b)?;
    bound_t2(&power_derivatives(s, a, b)?, s, p, a, b)
}

/// The restatement through the logarithmic mean:
/// `((b−a)/(4(p+1)^(1/p)))·|ab|^(s(s−1)/2)·(b^(s(1−s)/2) + a^(s(1−s)/2))·L(a^c, b^c)^(1/q)`
/// with `c = (s−1)sq/2`.
pub fn prop2_rhs_means(s: f64, p: f64, a: f64, b: f64) -> Result<f64> {
    check(s, a, b)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain(format!("p must be a finite number > 1, got {p}")));
    }
    let q = conjugate(p);
    let c = (s - 1.0) * s * q / 2.0;
    let log_mean = mean(MeanKind::Logarithmic, a.powf(c), b.powf(c))?;
    let e = s * (1.0 - s) / 2.0;
    Ok((b - a) / (4.0 * (p + 1.0).powf(1.0 / p))
        * (a * b).powf(s * (s - 1.0) / 2.0)
        * (b.powf(e) + a.powf(e))
        * log_mean.powf(1.0 / q))
}

pub fn prop3_rhs(s: f64, q: f64, a: f64, b: f64) -> Result<f64> {
    check(s, a, b)?;
    bound_t3(&power_derivatives(s, a, b)?, s, q, a, b)
}

/// The restatement as typeset for power functions, whose second bracket
/// reads `(x ln x + x − 1)/ln² x` where the `g1` kernel has
/// `(x ln x − x + 1)/ln² x`. Here `x < 1`, so that bracket is negative and
/// its `1/q`-th power is real only for `q = 1`; other `q` give an error.
pub fn prop3_rhs_as_printed(s: f64, q: f64, a: f64, b: f64) -> Result<f64> {
    check(s, a, b)?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(domain(format!("q must be a finite number >= 1, got {q}")));
    }
    let ratio = a / b;
    let e = (s - 1.0) * s * q / 2.0;
    let x = ratio.powf(e);
    let lx = e * ratio.ln();
    let first = g1(x)?;
    let y = ratio.powf(-e);
    let second = (y * (-lx) + y - 1.0) / (lx * lx);
    if second < 0.0 && q != 1.0 {
        return Err(Error::Eval(format!("second bracket is negative ({second}) at s = {s}, q = {q}, a = {a}, b = {b}")));
    }
    let half = 0.5f64.powf(1.0 - 1.0 / q);
    let lead = ratio.powf(s * (s - 1.0) / 2.0);
    Ok((b - a) / 4.0 * half * (lead * first.powf(1.0 / q) + second.powf(1.0 / q) / lead))
}

pub fn prop4_rhs(s: f64, mu1: f64, mu2: f64, a: f64, b: f64) -> Result<f64> {
    check(s, a, b)?;
    bound_t4(&power_derivatives(s, a, b)?, s, mu1, mu2, a, b)
}

/// The restatement with `(x − 1)/ln x` written out.
pub fn prop4_rhs_as_printed(s: f64, mu1: f64, mu2: f64, a: f64, b: f64) -> Result<f64> {
    check(s, a, b)?;
    let term = |mu: f64| {
        let eta = 1.0 - mu;
        let l = (s - 1.0) * s / (2.0 * eta) * (a / b).ln();
        eta * l.exp_m1() / l
    };
    Ok((b - a) / 4.0 * (a * b).powf(s * (s - 1.0) / 2.0) * (young_constant(mu1, mu2) + term(mu1) + term(mu2)))
}

/// One row of the worked example: inputs, published values, computed values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExampleRow {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub lhs_published: f64,
    pub rhs_published: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub lhs_rel_diff: f64,
    pub rhs_rel_diff: f64,
}

impl ExampleRow {
    pub fn within(&self, rel_tol: f64) -> bool {
        self.lhs_rel_diff <= rel_tol && self.rhs_rel_diff <= rel_tol
    }
}

/// Published `(s, a, b, lhs, rhs)` for `f(x) = x^s/s`.
#[allow(clippy::excessive_precision)]
pub const EXAMPLE2_PUBLISHED: [(f64, f64, f64, f64, f64); 3] = [
    (0.5, 0.89, 0.9, 4.921_067_116e-6, 2.570_313_847e-3),
    (0.2, 0.15, 0.6, 9.780_804_473e-2, 0.136_819_309_576_863_680_170_486),
    (0.75, 0.45, 0.86, 6.115_413_651e-2, 0.112_144_032_368_736_206_184_243),
];

/// Relative tolerance against the published digits.
pub const EXAMPLE2_REL_TOL: f64 = 1e-6;

/// Recomputes the worked-example table against `published`.
pub fn reproduce_table(published: &[(f64, f64, f64, f64, f64)]) -> Result<Vec<ExampleRow>> {
    published
        .iter()
        .map(|&(s, a, b, lhs_published, rhs_published)| {
            let lhs = prop_lhs(s, a, b)?;
            let rhs = prop1_rhs(s, a, b)?;
            Ok(ExampleRow {
                s,
                a,
                b,
                lhs_published,
                rhs_published,
                lhs,
                rhs,
                margin: rhs - lhs,
                lhs_rel_diff: ((lhs - lhs_published) / lhs_published).abs(),
                rhs_rel_diff: ((rhs - rhs_published) / rhs_published).abs(),
            })
        })
        .collect()
}

pub fn reproduce_example2() -> Result<Vec<ExampleRow>> {
    reproduce_table(&EXAMPLE2_PUBLISHED)
}
