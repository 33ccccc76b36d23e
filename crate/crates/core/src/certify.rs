//! Sampled checks of the hypotheses the bounds rely on.
//!
//! A certificate is evidence on a finite grid, not a proof. Every check uses
//! endpoint-inclusive uniform grids, an absolute slack of [`SLACK`], and
//! reports the smallest margin (RHS − LHS of the checked inequality) with the
//! sample that attains it. Ties go to the lexicographically smallest grid
//! index, so results do not depend on evaluation order.

use serde::Serialize;

use crate::error::{domain, Error, Result};

pub const SLACK: f64 = 1e-12;
pub const DEFAULT_GRID_1D: usize = 64;
pub const DEFAULT_GRID_3D: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    MonotoneDecreasing,
    GeometricallyConvex,
    SGeometricallyConvex,
    RangeUnitInterval,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::MonotoneDecreasing => "monotone_decreasing",
            Property::GeometricallyConvex => "geometrically_convex",
            Property::SGeometricallyConvex => "s_geometrically_convex",
            Property::RangeUnitInterval => "range_unit_interval",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// The sample attaining the worst margin, with both sides of the checked
/// inequality. For convexity checks the sides are in log form:
/// `lhs = ln g(x^t y^(1−t))`, `rhs = t^s ln g(x) + (1−t)^s ln g(y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub point: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCertificate {
    pub property: Property,
    pub verdict: Verdict,
    /// Samples per axis.
    pub grid: Vec<usize>,
    pub worst_margin: f64,
    /// Present exactly when the verdict is `Fail`.
    pub counterexample: Option<Counterexample>,
    /// Largest sampled value; recorded by the range check.
    pub max_sample: Option<f64>,
}

impl SampledCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * (i as f64 / last) })
        .collect()
}

fn check_interval(a: f64, b: f64, n: usize) -> Result<()> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(domain(format!("certificates need 0 < a < b, got [{a}, {b}]")));
    }
    if n < 2 {
        return Err(domain(format!("grid needs at least 2 samples, got {n}")));
    }
    Ok(())
}

/// Tracks the minimum margin; strict `<` keeps the earliest index on ties.
struct Worst {
    margin: f64,
    witness: Option<Counterexample>,
}

impl Worst {
    fn new() -> Self {
        Self { margin: f64::INFINITY, witness: None }
    }

    fn offer(&mut self, margin: f64, point: impl FnOnce() -> Vec<f64>, lhs: f64, rhs: f64) {
        if margin < self.margin {
            self.margin = margin;
            self.witness = Some(Counterexample { point: point(), lhs, rhs });
        }
    }

    fn finish(self, property: Property, grid: Vec<usize>, max_sample: Option<f64>) -> SampledCertificate {
        let fail = self.margin < -SLACK;
        SampledCertificate {
            property,
            verdict: if fail { Verdict::Fail } else { Verdict::Pass },
            grid,
            worst_margin: self.margin,
            counterexample: if fail { self.witness } else { None },
            max_sample,
        }
    }
}

/// `g(x_{i+1}) <= g(x_i) + SLACK` for consecutive samples. The
/// counterexample point is `(x_i, x_{i+1})` with `lhs = g(x_{i+1})`,
/// `rhs = g(x_i)`.
pub fn check_monotone_decreasing<G>(g: G, a: f64, b: f64, n: usize) -> Result<SampledCertificate>
where
    G: Fn(f64) -> Result<f64>,
{
    check_interval(a, b, n)?;
    let xs = grid(a, b, n);
    let ys = xs.iter().map(|&x| g(x)).collect::<Result<Vec<_>>>()?;
    let mut worst = Worst::new();
    for i in 0..n - 1 {
        let margin = ys[i] - ys[i + 1];
        worst.offer(margin, || vec![xs[i], xs[i + 1]], ys[i + 1], ys[i]);
    }
    Ok(worst.finish(Property::MonotoneDecreasing, vec![n], None))
}

/// `g(x^t y^(1−t)) <= g(x)^(t^s) · g(y)^((1−t)^s)` on an `n × n × n` grid of
/// `(x, y, t) ∈ [a, b]² × [0, 1]`, checked in log form.
pub fn check_s_geometric_convexity<G>(g: G, a: f64, b: f64, s: f64, n: usize) -> Result<SampledCertificate>
where
    G: Fn(f64) -> Result<f64>,
{
    check_interval(a, b, n)?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain(format!("s must lie in (0, 1], got {s}")));
    }
    let property = if s == 1.0 {
        Property::GeometricallyConvex
    } else {
        Property::SGeometricallyConvex
    };
    let mut cert = log_convexity_grid(&g, a, b, s, n)?;
    cert.property = property;
    Ok(cert)
}

/// The `s = 1` case: `g(x^t y^(1−t)) <= g(x)^t g(y)^(1−t)`.
pub fn check_geometric_convexity<G>(g: G, a: f64, b: f64, n: usize) -> Result<SampledCertificate>
where
    G: Fn(f64) -> Result<f64>,
{
    check_s_geometric_convexity(g, a, b, 1.0, n)
}

fn positive_log<G: Fn(f64) -> Result<f64>>(g: &G, x: f64) -> Result<f64> {
    let v = g(x)?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(domain(format!("function must be positive for the log-form check, g({x}) = {v}")));
    }
    Ok(v.ln())
}

fn log_convexity_grid<G>(g: &G, a: f64, b: f64, s: f64, n: usize) -> Result<SampledCertificate>
where
    G: Fn(f64) -> Result<f64>,
{
    let xs = grid(a, b, n);
    let ts = grid(0.0, 1.0, n);
    let log_g = xs.iter().map(|&x| positive_log(g, x)).collect::<Result<Vec<_>>>()?;
    let ln_x: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let weights: Vec<(f64, f64)> = ts.iter().map(|&t| (t.powf(s), (1.0 - t).powf(s))).collect();
    let mut worst = Worst::new();
    for i in 0..n {
        for j in 0..n {
            for (k, &t) in ts.iter().enumerate() {
                let mid = (t * ln_x[i] + (1.0 - t) * ln_x[j]).exp().clamp(a, b);
                let lhs = positive_log(g, mid)?;
                let (wx, wy) = weights[k];
                let rhs = wx * log_g[i] + wy * log_g[j];
                worst.offer(rhs - lhs, || vec![xs[i], xs[j], t], lhs, rhs);
            }
        }
    }
    Ok(worst.finish(Property::SGeometricallyConvex, vec![n, n, n], None))
}

/// `0 < g(x) <= 1 + SLACK` at every sample. The margin at a sample is
/// `min(g, 1 − g)`; the largest sample is recorded.
pub fn check_range_unit<G>(g: G, a: f64, b: f64, n: usize) -> Result<SampledCertificate>
where
    G: Fn(f64) -> Result<f64>,
{
    check_interval(a, b, n)?;
    let mut worst = Worst::new();
    let mut max_sample = f64::NEG_INFINITY;
    let mut non_positive: Option<Counterexample> = None;
    for x in grid(a, b, n) {
        let v = g(x)?;
        max_sample = max_sample.max(v);
        if v <= 0.0 && non_positive.is_none() {
            non_positive = Some(Counterexample { point: vec![x], lhs: 0.0, rhs: v });
        }
        worst.offer((1.0 - v).min(v), || vec![x], v, 1.0);
    }
    let mut cert = worst.finish(Property::RangeUnitInterval, vec![n], Some(max_sample));
    if let Some(ce) = non_positive {
        if cert.verdict == Verdict::Pass {
            cert.verdict = Verdict::Fail;
            cert.counterexample = Some(ce);
        }
    }
    Ok(cert)
}

/// Re-evaluates a convexity counterexample independently of the grid walk
/// and returns the violation `lhs − rhs` (positive means violated).
pub fn convexity_violation<G>(g: G, s: f64, ce: &Counterexample) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let [x, y, t] = ce.point[..] else {
        return Err(Error::Input("convexity counterexample needs (x, y, t)".into()));
    };
    let mid = x.powf(t) * y.powf(1.0 - t);
    let lhs = g(mid)?.ln();
    let rhs = t.powf(s) * g(x)?.ln() + (1.0 - t).powf(s) * g(y)?.ln();
    Ok(lhs - rhs)
}
