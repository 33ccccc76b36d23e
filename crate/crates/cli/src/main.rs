//! `hadamard`: evaluate, certify, tune and reproduce trapezoid-defect bounds.
//!
//! Exit codes: 0 success, 1 inequality or reproduction failure, 2 hypothesis
//! rejected in strict mode, 3 invalid input or evaluation error.

mod commands;
mod config;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hadamard_core::sampling::Family;
use hadamard_core::Mode;

use config::{Builtin, Format, PropertyArg, RunConfig, TuneTarget};

const EXIT_INPUT: u8 = 3;

/// Any failure that maps to exit code 3.
#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Self(format!("output error: {}", msg.into()))
    }
}

impl From<hadamard_core::Error> for CliError {
    fn from(e: hadamard_core::Error) -> Self {
        Self(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    #[value(name = "paper_compat")]
    PaperCompat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Admissible,
    Unscaled,
}

#[derive(Parser)]
#[command(name = "hadamard", version, about = "Trapezoid-defect bounds for s-geometrically convex derivatives")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Report bounds only under certified hypotheses (strict) or always.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with default values; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args, Default)]
struct FunctionArgs {
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// Scale of the built-in power family.
    #[arg(long)]
    c: Option<f64>,
    /// Expression for f in x.
    #[arg(long)]
    f: Option<String>,
    /// Expression for f' in x.
    #[arg(long)]
    fprime: Option<String>,
}

#[derive(Args, Default)]
struct IntervalArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
}

#[derive(Args, Default)]
struct BoundArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    mu2: Option<f64>,
    #[arg(long = "grid-1d")]
    grid_1d: Option<usize>,
    #[arg(long = "grid-3d")]
    grid_3d: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the defect and all four bounds for one function.
    Eval {
        #[command(flatten)]
        func: FunctionArgs,
        #[command(flatten)]
        interval: IntervalArgs,
        #[command(flatten)]
        bound: BoundArgs,
    },
    /// Seeded sweep over the power family f'(x) = c x^(s-1).
    Verify {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long = "s-range", num_args = 2, value_names = ["LO", "HI"])]
        s_range: Option<Vec<f64>>,
        #[arg(long = "a-range", num_args = 2, value_names = ["LO", "HI"])]
        a_range: Option<Vec<f64>>,
        #[arg(long = "b-range", num_args = 2, value_names = ["LO", "HI"])]
        b_range: Option<Vec<f64>>,
        #[command(flatten)]
        bound: BoundArgs,
    },
    /// Check one hypothesis of |f'|^q on a sample grid.
    Certify {
        #[command(flatten)]
        func: FunctionArgs,
        #[command(flatten)]
        interval: IntervalArgs,
        #[arg(long, value_enum)]
        property: Option<PropertyArg>,
        /// Exponent applied to |f'| before checking.
        #[arg(long)]
        q: Option<f64>,
        /// Samples per axis.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Tune p (t2) or mu (t4); without --theorem, rank all four bounds.
    Tune {
        #[arg(long, value_enum)]
        theorem: Option<TuneTarget>,
        #[arg(long)]
        fa: Option<f64>,
        #[arg(long)]
        fb: Option<f64>,
        #[command(flatten)]
        func: FunctionArgs,
        #[command(flatten)]
        interval: IntervalArgs,
    },
    /// Recompute the published table for f(x) = x^s/s.
    Reproduce {
        /// Also compare the third restatement with its printed form.
        #[arg(long = "prop3-as-printed")]
        prop3_as_printed: bool,
        #[arg(long = "rel-tol")]
        rel_tol: Option<f64>,
        /// Scales the published constants by (1 + REL); for testing the mismatch path.
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb: f64,
    },
}

fn pair(v: &Option<Vec<f64>>) -> Option<[f64; 2]> {
    v.as_ref().map(|v| [v[0], v[1]])
}

fn overlay_function(cfg: &mut RunConfig, func: &FunctionArgs) {
    overlay!(cfg, func, builtin, c, f, fprime);
}

fn overlay_interval(cfg: &mut RunConfig, interval: &IntervalArgs) {
    overlay!(cfg, interval, a, b, s);
}

fn overlay_bound(cfg: &mut RunConfig, bound: &BoundArgs) {
    overlay!(cfg, bound, p, q, mu1, mu2, grid_1d, grid_3d);
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(m) = cli.global.mode {
        cfg.mode = Some(match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::PaperCompat => Mode::PaperCompat,
        });
    }
    overlay!(cfg, cli.global, format, out, seed);

    let outcome = match &cli.command {
        Command::Eval { func, interval, bound } => {
            overlay_function(&mut cfg, func);
            overlay_interval(&mut cfg, interval);
            overlay_bound(&mut cfg, bound);
            commands::eval(&cfg)?
        }
        Command::Verify { samples, family, s_range, a_range, b_range, bound } => {
            if let Some(n) = samples {
                cfg.samples = Some(*n);
            }
            if let Some(f) = family {
                cfg.family = Some(match f {
                    FamilyArg::Admissible => Family::Admissible,
                    FamilyArg::Unscaled => Family::Unscaled,
                });
            }
            for (slot, v) in [(&mut cfg.s_range, s_range), (&mut cfg.a_range, a_range), (&mut cfg.b_range, b_range)] {
                if let Some(p) = pair(v) {
                    *slot = Some(p);
                }
            }
            overlay_bound(&mut cfg, bound);
            commands::verify(&cfg)?
        }
        Command::Certify { func, interval, property, q, grid } => {
            overlay_function(&mut cfg, func);
            overlay_interval(&mut cfg, interval);
            if let Some(p) = property {
                cfg.property = Some(*p);
            }
            if let Some(q) = q {
                cfg.q = Some(*q);
            }
            if let Some(n) = grid {
                cfg.grid_1d = Some(*n);
                cfg.grid_3d = Some(*n);
            }
            commands::certify(&cfg)?
        }
        Command::Tune { theorem, fa, fb, func, interval } => {
            overlay_function(&mut cfg, func);
            overlay_interval(&mut cfg, interval);
            if let Some(t) = theorem {
                cfg.theorem = Some(*t);
            }
            if let Some(v) = fa {
                cfg.fa = Some(*v);
            }
            if let Some(v) = fb {
                cfg.fb = Some(*v);
            }
            commands::tune(&cfg)?
        }
        Command::Reproduce { prop3_as_printed, rel_tol, perturb } => {
            if let Some(t) = rel_tol {
                cfg.rel_tol = Some(*t);
            }
            commands::reproduce(&cfg, *perturb, *prop3_as_printed)?
        }
    };
    render::emit(&outcome.body, cfg.out.as_deref())?;
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
