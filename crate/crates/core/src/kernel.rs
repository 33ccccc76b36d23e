//! Scalar kernels shared by every bound: the endpoint ratio `alpha`, the
//! integral kernels `g1`/`g2` with their removable singularity at 1, the
//! power-tower comparison used by the bound derivations, and the special
//! means `A`, `L` and `L_p`.
//!
//! `g1(alpha) = ∫₀¹ t·alpha^t dt` and `g2(alpha) = ∫₀¹ alpha^t dt`. Both are
//! evaluated from `x = ln(alpha)` so that callers working in log-space never
//! materialise `alpha` itself.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Below this `|ln alpha|` the kernels switch to their Taylor series.
pub const SEAM_THRESHOLD: f64 = 1e-4;

/// Above this `ln alpha` the log-kernels use their asymptotic rewrite.
const LOG_BRANCH: f64 = 30.0;

/// Slack used by [`pow_tower_holds`].
pub const POW_TOWER_TOL: f64 = 1e-15;

/// Largest exponent whose `exp` is finite.
const MAX_EXPONENT: f64 = 709.782_712_893_384;
/// Smallest exponent whose `exp` is a normal positive number.
const MIN_EXPONENT: f64 = -708.396_418_532_264_1;

/// `|f'(a)|` and `|f'(b)|`, both strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointDerivatives {
    fa_abs: f64,
    fb_abs: f64,
}

impl EndpointDerivatives {
    pub fn new(fa_abs: f64, fb_abs: f64) -> Result<Self> {
        for (name, v) in [("|f'(a)|", fa_abs), ("|f'(b)|", fb_abs)] {
            if !v.is_finite() {
                return Err(domain(format!("{name} must be finite, got {v}")));
            }
            if v <= 0.0 {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { fa_abs, fb_abs })
    }

    /// Both endpoint values equal to one.
    pub fn unit() -> Self {
        Self {
            fa_abs: 1.0,
            fb_abs: 1.0,
        }
    }

    pub fn fa_abs(&self) -> f64 {
        self.fa_abs
    }

    pub fn fb_abs(&self) -> f64 {
        self.fb_abs
    }

    /// The same pair with the endpoints exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            fa_abs: self.fb_abs,
            fb_abs: self.fa_abs,
        }
    }

    /// `(|f'(a)|·|f'(b)|)^e`, computed in log-space.
    pub fn product_pow(&self, e: f64) -> Result<f64> {
        exp_checked(e * (self.fa_abs.ln() + self.fb_abs.ln()))
    }
}

/// `exp(x)`, refusing exponents whose result would overflow or leave the
/// normal range.
pub fn exp_checked(x: f64) -> Result<f64> {
    if x.is_nan() || !(MIN_EXPONENT..=MAX_EXPONENT).contains(&x) {
        return Err(Error::Overflow { exponent: x });
    }
    Ok(x.exp())
}

/// `ln alpha(u, v) = u·ln|f'(a)| − v·ln|f'(b)|`.
pub fn ln_alpha(d: &EndpointDerivatives, u: f64, v: f64) -> f64 {
    u * d.fa_abs.ln() - v * d.fb_abs.ln()
}

/// `alpha(u, v) = |f'(a)|^u · |f'(b)|^(−v)`.
pub fn alpha(d: &EndpointDerivatives, u: f64, v: f64) -> Result<f64> {
    if !u.is_finite() || !v.is_finite() {
        return Err(domain(format!("alpha exponents must be finite, got ({u}, {v})")));
    }
    exp_checked(ln_alpha(d, u, v))
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 || alpha.is_infinite() {
        return Err(domain(format!("kernel argument must be positive and finite, got {alpha}")));
    }
    Ok(alpha.ln())
}

/// `g1(alpha)`; 1/2 at alpha = 1, `(alpha ln alpha − alpha + 1)/(ln alpha)²`
/// elsewhere.
pub fn g1(alpha: f64) -> Result<f64> {
    g1_ln(check_alpha(alpha)?)
}

/// `g2(alpha)`; 1 at alpha = 1, `(alpha − 1)/ln alpha` elsewhere.
pub fn g2(alpha: f64) -> Result<f64> {
    g2_ln(check_alpha(alpha)?)
}

/// [`g1`] as a function of `x = ln alpha`.
pub fn g1_ln(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Overflow { exponent: x });
    }
    if x.abs() < SEAM_THRESHOLD {
        // sum_{n>=2} (n-1) x^(n-2) / n!
        const C: [f64; 6] = [
            1.0 / 2.0,
            1.0 / 3.0,
            1.0 / 8.0,
            1.0 / 30.0,
            1.0 / 144.0,
            1.0 / 840.0,
        ];
        return Ok(horner(&C, x));
    }
    if x > MAX_EXPONENT {
        return Err(Error::Overflow { exponent: x });
    }
    // x·e^x − (e^x − 1): cancels to x²/2 with relative error ~eps/|x|.
    let value = (x * x.exp() - x.exp_m1()) / (x * x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { exponent: x })
    }
}

/// [`g2`] as a function of `x = ln alpha`.
pub fn g2_ln(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Overflow { exponent: x });
    }
    if x.abs() < SEAM_THRESHOLD {
        // sum_{n>=0} x^n / (n+1)!
        const C: [f64; 6] = [1.0, 1.0 / 2.0, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0, 1.0 / 720.0];
        return Ok(horner(&C, x));
    }
    if x > MAX_EXPONENT {
        return Err(Error::Overflow { exponent: x });
    }
    Ok(x.exp_m1() / x)
}

/// `ln g1(e^x)`, finite for every finite `x`.
pub fn ln_g1_ln(x: f64) -> Result<f64> {
    if x > LOG_BRANCH {
        // (x−1)e^x + 1 = e^x (x − 1 + e^(−x))
        return Ok(x + (x - 1.0 + (-x).exp()).ln() - 2.0 * x.ln());
    }
    Ok(g1_ln(x)?.ln())
}

/// `ln g2(e^x)`, finite for every finite `x`.
pub fn ln_g2_ln(x: f64) -> Result<f64> {
    if x > LOG_BRANCH {
        return Ok(x + (-(-x).exp()).ln_1p() - x.ln());
    }
    Ok(g2_ln(x)?.ln())
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Checks `k^(m^n) <= k^(m·n)` for `k, m, n ∈ (0, 1]`.
pub fn pow_tower_holds(k: f64, m: f64, n: f64) -> Result<bool> {
    for (name, v) in [("k", k), ("m", m), ("n", n)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(domain(format!("{name} must lie in (0, 1], got {v}")));
        }
    }
    Ok(k.powf(m.powf(n)) <= k.powf(m * n) + POW_TOWER_TOL)
}

/// The two-argument means used to restate the bounds for power functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanKind {
    Arithmetic,
    Logarithmic,
    /// `L_p`, defined for `p ∉ {−1, 0}`.
    GeneralizedLogarithmic(f64),
}

/// `A(a, b)`, `L(a, b)` or `L_p(a, b)`. Coincident arguments return `a`.
pub fn mean(kind: MeanKind, a: f64, b: f64) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain(format!("mean argument {name} must be positive and finite, got {v}")));
        }
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    match kind {
        MeanKind::Arithmetic => Ok((a + b) / 2.0),
        MeanKind::Logarithmic => {
            if lo == hi {
                return Ok(lo);
            }
            let width = hi - lo;
            Ok(width / (width / lo).ln_1p())
        }
        MeanKind::GeneralizedLogarithmic(p) => {
            if !p.is_finite() || p == 0.0 || p == -1.0 {
                return Err(domain(format!("L_p needs finite p outside {{-1, 0}}, got {p}")));
            }
            if lo == hi {
                return Ok(lo);
            }
            let width = hi - lo;
            let log_ratio = (width / lo).ln_1p();
            // b^(p+1) − a^(p+1) = a^(p+1)·expm1((p+1)·ln(b/a))
            let diff = lo.powf(p + 1.0) * ((p + 1.0) * log_ratio).exp_m1();
            let inner = diff / ((p + 1.0) * width);
            Ok(inner.powf(1.0 / p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn alpha_equal_endpoints_cancel() {
        let d = EndpointDerivatives::new(0.7, 0.7).unwrap();
        assert_eq!(alpha(&d, 3.0, 3.0).unwrap(), 1.0);
        assert_eq!(alpha(&d, 0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn alpha_for_power_family_row() {
        let (s, a, b): (f64, f64, f64) = (0.5, 0.89, 0.9);
        let d = EndpointDerivatives::new(a.powf(s - 1.0), b.powf(s - 1.0)).unwrap();
        // alpha(s/2, s/2) = (a/b)^((s-1)s/2)
        let expected = (a / b).powf((s - 1.0) * s / 2.0);
        let got = alpha(&d, s / 2.0, s / 2.0).unwrap();
        assert!(close(got, expected, 1e-15));
        assert!(close(got, 1.0014, 1e-4));
        // the literal exponent (s-1)s/2 applied to these derivatives
        let literal = alpha(&d, (s - 1.0) * s / 2.0, (s - 1.0) * s / 2.0).unwrap();
        assert!(close(literal, (a / b).powf(0.0625), 1e-15));
    }

    #[test]
    fn alpha_overflow_is_reported() {
        let d = EndpointDerivatives::new(10.0, 0.1).unwrap();
        assert!(matches!(alpha(&d, 400.0, 400.0), Err(Error::Overflow { .. })));
        assert!(matches!(alpha(&d, -400.0, -400.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn endpoint_derivatives_reject_bad_values() {
        assert!(EndpointDerivatives::new(0.0, 1.0).is_err());
        assert!(EndpointDerivatives::new(1.0, -2.0).is_err());
        assert!(EndpointDerivatives::new(f64::INFINITY, 1.0).is_err());
        assert!(EndpointDerivatives::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn g1_reference_values() {
        assert_eq!(g1(1.0).unwrap(), 0.5);
        assert!(close(g1(std::f64::consts::E).unwrap(), 1.0, 1e-15));
        let l2 = std::f64::consts::LN_2;
        let closed = (2.0 * l2 - 1.0) / (l2 * l2);
        assert!(close(g1(2.0).unwrap(), closed, 1e-15));
        assert!(close(g1(2.0).unwrap(), 0.804_021_1, 1e-7));
    }

    #[test]
    fn g2_reference_values() {
        assert_eq!(g2(1.0).unwrap(), 1.0);
        assert!(close(g2(2.0).unwrap(), 1.0 / std::f64::consts::LN_2, 1e-15));
        assert!(close(g2(0.25).unwrap(), 0.541_010_6, 1e-7));
    }

    #[test]
    fn kernels_reject_non_positive() {
        assert!(matches!(g1(0.0), Err(Error::Domain(_))));
        assert!(matches!(g2(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn seam_continuity() {
        for eps in [1e-5, 1e-7, 1e-9] {
            for alpha in [1.0 + eps, 1.0 - eps] {
                assert!((g1(alpha).unwrap() - 0.5).abs() <= eps);
                assert!((g2(alpha).unwrap() - 1.0).abs() <= eps);
            }
        }
        // the two branches meet at the threshold
        for x in [SEAM_THRESHOLD, -SEAM_THRESHOLD] {
            let below = g1_ln(x * (1.0 - 1e-12)).unwrap();
            let above = g1_ln(x * (1.0 + 1e-12)).unwrap();
            assert!(close(below, above, 1e-10));
            let below = g2_ln(x * (1.0 - 1e-12)).unwrap();
            let above = g2_ln(x * (1.0 + 1e-12)).unwrap();
            assert!(close(below, above, 1e-15));
        }
    }

    #[test]
    fn log_kernels_agree_and_stay_finite() {
        for x in [-50.0, -3.0, -1e-6, 0.0, 2e-5, 0.7, 12.0, 29.9, 30.1, 200.0] {
            let direct1 = g1_ln(x).unwrap().ln();
            let direct2 = g2_ln(x).unwrap().ln();
            assert!((ln_g1_ln(x).unwrap() - direct1).abs() <= 1e-13 * direct1.abs().max(1.0));
            assert!((ln_g2_ln(x).unwrap() - direct2).abs() <= 1e-13 * direct2.abs().max(1.0));
        }
        assert!(ln_g1_ln(5000.0).unwrap().is_finite());
        assert!(ln_g2_ln(5000.0).unwrap().is_finite());
        assert!(matches!(g2_ln(5000.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn pow_tower_examples() {
        assert!(pow_tower_holds(1.0, 0.3, 0.9).unwrap());
        assert!(pow_tower_holds(0.5, 0.5, 0.5).unwrap());
        assert!(close(0.5f64.powf(0.5f64.powf(0.5)), 0.6126, 1e-4));
        assert!(close(0.5f64.powf(0.25), 0.8409, 1e-4));
        assert!(pow_tower_holds(0.9, 1.0, 1.0).unwrap());
        assert!(pow_tower_holds(0.0, 0.5, 0.5).is_err());
        assert!(pow_tower_holds(0.5, 1.5, 0.5).is_err());
    }

    #[test]
    fn mean_examples() {
        assert_eq!(mean(MeanKind::Arithmetic, 1.0, 1.0).unwrap(), 1.0);
        let e = std::f64::consts::E;
        assert!(close(mean(MeanKind::Logarithmic, 1.0, e).unwrap(), e - 1.0, 1e-15));
        let l1 = mean(MeanKind::GeneralizedLogarithmic(1.0), 0.3, 0.7).unwrap();
        assert!(close(l1, 0.5, 1e-15));
        assert_eq!(mean(MeanKind::Logarithmic, 0.4, 0.4).unwrap(), 0.4);
        assert_eq!(mean(MeanKind::GeneralizedLogarithmic(0.5), 0.4, 0.4).unwrap(), 0.4);
    }

    #[test]
    fn mean_errors() {
        assert!(mean(MeanKind::Arithmetic, 0.0, 1.0).is_err());
        assert!(mean(MeanKind::GeneralizedLogarithmic(0.0), 0.2, 1.0).is_err());
        assert!(mean(MeanKind::GeneralizedLogarithmic(-1.0), 0.2, 1.0).is_err());
    }

    #[test]
    fn generalized_log_mean_matches_direct_formula() {
        for &(p, a, b) in &[(0.3f64, 0.15f64, 0.6f64), (-0.5, 0.2, 0.9), (2.5, 0.45, 0.86)] {
            let direct: f64 =
                ((b.powf(p + 1.0) - a.powf(p + 1.0)) / ((p + 1.0) * (b - a))).powf(1.0 / p);
            let got = mean(MeanKind::GeneralizedLogarithmic(p), a, b).unwrap();
            assert!(((got - direct) / direct).abs() < 1e-13);
        }
    }
}
