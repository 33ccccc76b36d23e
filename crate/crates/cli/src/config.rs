//! Run configuration: a JSON file overlaid by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use hadamard_core::sampling::{Family, SweepRanges};
use hadamard_core::{FunctionSpec, Grids, Mode, ParamSet};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    #[value(name = "power_s")]
    PowerS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PropertyArg {
    Monotone,
    Sconvex,
    Gconvex,
    Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TuneTarget {
    T2,
    T4,
}

/// Every key accepted in a config file. All optional; flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,

    pub builtin: Option<Builtin>,
    pub c: Option<f64>,
    pub f: Option<String>,
    pub fprime: Option<String>,

    pub a: Option<f64>,
    pub b: Option<f64>,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub fa: Option<f64>,
    pub fb: Option<f64>,

    pub grid_1d: Option<usize>,
    pub grid_3d: Option<usize>,

    pub samples: Option<usize>,
    pub family: Option<Family>,
    pub s_range: Option<[f64; 2]>,
    pub a_range: Option<[f64; 2]>,
    pub b_range: Option<[f64; 2]>,

    pub property: Option<PropertyArg>,
    pub theorem: Option<TuneTarget>,
    pub rel_tol: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("bad config {}: {e}", path.display())))
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or_default()
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn require<T: Copy>(value: Option<T>, name: &str) -> Result<T, CliError> {
        value.ok_or_else(|| CliError::input(format!("missing required value --{name}")))
    }

    pub fn interval(&self) -> Result<(f64, f64), CliError> {
        let a = Self::require(self.a, "a")?;
        let b = Self::require(self.b, "b")?;
        if !(a > 0.0 && a < b && b.is_finite()) {
            return Err(CliError::input(format!("need 0 < a < b, got a = {a}, b = {b}")));
        }
        Ok((a, b))
    }

    pub fn s(&self) -> Result<f64, CliError> {
        let s = Self::require(self.s, "s")?;
        if !(s > 0.0 && s <= 1.0) {
            return Err(CliError::input(format!("s must lie in (0, 1], got {s}")));
        }
        Ok(s)
    }

    pub fn function(&self) -> Result<FunctionSpec, CliError> {
        match (self.builtin, &self.fprime) {
            (Some(_), Some(_)) => Err(CliError::input("give either --builtin or --fprime, not both")),
            (Some(Builtin::PowerS), None) => {
                if self.f.is_some() {
                    return Err(CliError::input("--f cannot be combined with --builtin"));
                }
                let s = Self::require(self.s, "s")?;
                Ok(FunctionSpec::builtin_power_s(s, self.c.unwrap_or(1.0))?)
            }
            (None, Some(fp)) => Ok(FunctionSpec::from_exprs(self.f.as_deref(), fp)?),
            (None, None) => Err(CliError::input("no function given: use --builtin power_s or --fprime EXPR")),
        }
    }

    pub fn params(&self) -> Result<ParamSet, CliError> {
        self.params_for(self.s()?)
    }

    /// Bound parameters with `s` supplied by the caller.
    pub fn params_for(&self, s: f64) -> Result<ParamSet, CliError> {
        let mut ps = ParamSet::new(s);
        if let Some(p) = self.p {
            ps.p = p;
        }
        if let Some(q) = self.q {
            ps.q = q;
        }
        if let Some(mu1) = self.mu1 {
            ps.mu1 = mu1;
        }
        if let Some(mu2) = self.mu2 {
            ps.mu2 = mu2;
        }
        ps.mode = self.mode();
        ps.validate()?;
        Ok(ps)
    }

    pub fn grids(&self) -> Result<Grids, CliError> {
        let mut g = Grids::default();
        if let Some(n) = self.grid_1d {
            g.grid_1d = n;
        }
        if let Some(n) = self.grid_3d {
            g.grid_3d = n;
        }
        if g.grid_1d < 2 || g.grid_3d < 2 {
            return Err(CliError::input("grid sizes must be at least 2"));
        }
        Ok(g)
    }

    pub fn ranges(&self) -> SweepRanges {
        let mut r = SweepRanges::default();
        if let Some(v) = self.s_range {
            r.s = v;
        }
        if let Some(v) = self.a_range {
            r.a = v;
        }
        if let Some(v) = self.b_range {
            r.b = v;
        }
        r
    }
}

/// Copies every flag that was given into the config.
#[macro_export]
macro_rules! overlay {
    ($cfg:expr, $args:expr, $($field:ident),+ $(,)?) => {
        $(
            if let Some(v) = &$args.$field {
                $cfg.$field = Some(v.clone());
            }
        )+
    };
}
