//! Functions under test: a primitive `f` together with its derivative `f'`.
//!
//! A [`FunctionSpec`] is either the built-in power family
//! `f(x) = c·x^s/s`, `f'(x) = c·x^(s−1)` or a pair of parsed expressions.
//! The primitive is optional for parsed specs; operations that need it fall
//! back to the derivative where an equivalent formula exists.

pub mod expr;

use serde::Serialize;

pub use expr::{parse, BinOp, Expr, Func};

use crate::error::{domain, input, Error, Result};

/// Relative mismatch between `f'` and a finite difference of `f` that
/// triggers a consistency warning.
pub const DERIVATIVE_MISMATCH_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSource {
    PowerS { s: f64, c: f64 },
    Parsed {
        #[serde(skip)]
        f: Option<Expr>,
        #[serde(skip)]
        fprime: Expr,
        f_src: Option<String>,
        fprime_src: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionSpec {
    source: FunctionSource,
    label: String,
}

impl FunctionSpec {
    /// `f(x) = c·x^s/s`, `f'(x) = c·x^(s−1)` with `0 < s < 1`, `c > 0`.
    pub fn builtin_power_s(s: f64, c: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(domain(format!("power_s needs 0 < s < 1, got s = {s}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain(format!("power_s needs finite c > 0, got c = {c}")));
        }
        Ok(Self {
            source: FunctionSource::PowerS { s, c },
            label: format!("power_s(s={s}, c={c})"),
        })
    }

    /// Parsed derivative, with an optional parsed primitive.
    pub fn from_exprs(f: Option<&str>, fprime: &str) -> Result<Self> {
        let f_expr = f.map(parse).transpose()?;
        let fprime_expr = parse(fprime)?;
        let label = match f {
            Some(src) => format!("f(x) = {src}, f'(x) = {fprime}"),
            None => format!("f'(x) = {fprime}"),
        };
        Ok(Self {
            source: FunctionSource::Parsed {
                f: f_expr,
                fprime: fprime_expr,
                f_src: f.map(str::to_owned),
                fprime_src: fprime.to_owned(),
            },
            label,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source(&self) -> &FunctionSource {
        &self.source
    }

    /// `(s, c)` when this is the built-in power family.
    pub fn power_params(&self) -> Option<(f64, f64)> {
        match self.source {
            FunctionSource::PowerS { s, c } => Some((s, c)),
            FunctionSource::Parsed { .. } => None,
        }
    }

    pub fn has_f(&self) -> bool {
        match &self.source {
            FunctionSource::PowerS { .. } => true,
            FunctionSource::Parsed { f, .. } => f.is_some(),
        }
    }

    pub fn f(&self, x: f64) -> Result<f64> {
        let v = match &self.source {
            FunctionSource::PowerS { s, c } => c * x.powf(*s) / s,
            FunctionSource::Parsed { f: Some(f), .. } => f.eval(x)?,
            FunctionSource::Parsed { f: None, .. } => {
                return Err(input("no expression for f was supplied"));
            }
        };
        finite(v, x)
    }

    pub fn fprime(&self, x: f64) -> Result<f64> {
        let v = match &self.source {
            FunctionSource::PowerS { s, c } => c * x.powf(s - 1.0),
            FunctionSource::Parsed { fprime, .. } => fprime.eval(x)?,
        };
        finite(v, x)
    }

    pub fn abs_fprime(&self, x: f64) -> Result<f64> {
        self.fprime(x).map(f64::abs)
    }

    /// Compares `f'` with a central difference of `f` at interior points of
    /// `[a, b]`. Returns one message per point where the relative mismatch
    /// exceeds [`DERIVATIVE_MISMATCH_TOL`]; empty when no `f` was given.
    pub fn consistency_warnings(&self, a: f64, b: f64) -> Vec<String> {
        if !self.has_f() || !(a < b) {
            return Vec::new();
        }
        const POINTS: usize = 16;
        let mut warnings = Vec::new();
        for i in 1..=POINTS {
            let x = a + (b - a) * i as f64 / (POINTS + 1) as f64;
            let h = 1e-6 * x.abs().max(1e-3).min(b - a);
            let (Ok(fp), Ok(hi), Ok(lo)) = (self.fprime(x), self.f(x + h), self.f(x - h)) else {
                continue;
            };
            let fd = (hi - lo) / (2.0 * h);
            let scale = fp.abs().max(fd.abs()).max(1e-12);
            let rel = (fd - fp).abs() / scale;
            if rel > DERIVATIVE_MISMATCH_TOL {
                warnings.push(format!(
                    "f' disagrees with finite difference of f at x = {x}: f' = {fp}, difference quotient = {fd}"
                ));
            }
        }
        warnings
    }
}

fn finite(v: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Eval(format!("non-finite value at x = {x}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_s_values() {
        let fs = FunctionSpec::builtin_power_s(0.5, 1.0).unwrap();
        assert_eq!(fs.f(0.25).unwrap(), 1.0);
        assert_eq!(fs.fprime(0.25).unwrap(), 2.0);
        assert!(fs.label().contains("s=0.5"));

        let fs = FunctionSpec::builtin_power_s(0.2, 0.5).unwrap();
        let direct = 0.5 * 0.8f64.powf(-0.8);
        assert_eq!(fs.fprime(0.8).unwrap(), direct);
        assert!((direct - 0.597_72).abs() < 1e-5);
    }

    #[test]
    fn power_s_matches_parsed_form() {
        let s = 0.5;
        let builtin = FunctionSpec::builtin_power_s(s, 1.0).unwrap();
        let parsed = FunctionSpec::from_exprs(Some("x^0.5/0.5"), "x^(0.5-1)").unwrap();
        for x in [0.1, 0.45, 0.89, 0.9, 1.0] {
            assert!((builtin.f(x).unwrap() - parsed.f(x).unwrap()).abs() < 1e-15);
            assert!((builtin.fprime(x).unwrap() - parsed.fprime(x).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn power_s_domain() {
        assert!(FunctionSpec::builtin_power_s(0.0, 1.0).is_err());
        assert!(FunctionSpec::builtin_power_s(1.0, 1.0).is_err());
        assert!(FunctionSpec::builtin_power_s(0.5, 0.0).is_err());
    }

    #[test]
    fn missing_primitive() {
        let fs = FunctionSpec::from_exprs(None, "x").unwrap();
        assert!(!fs.has_f());
        assert!(matches!(fs.f(0.5), Err(Error::Input(_))));
        assert!(fs.consistency_warnings(0.1, 0.9).is_empty());
    }

    #[test]
    fn consistency_check() {
        let good = FunctionSpec::from_exprs(Some("x^2"), "2*x").unwrap();
        assert!(good.consistency_warnings(0.2, 0.8).is_empty());
        let bad = FunctionSpec::from_exprs(Some("x^2"), "3*x").unwrap();
        assert_eq!(bad.consistency_warnings(0.2, 0.8).len(), 16);
        let builtin = FunctionSpec::builtin_power_s(0.3, 0.7).unwrap();
        assert!(builtin.consistency_warnings(0.05, 1.0).is_empty());
    }
}
