//! Trapezoid-defect bounds for functions whose derivative is
//! s-geometrically convex.
//!
//! The crate evaluates `|(f(a) + f(b))/2 − (1/(b − a))∫_a^b f|` and four
//! closed-form upper bounds for it, checks the hypotheses of those bounds on
//! sample grids, tunes the free parameters of two of them and restates the
//! bounds for `f(x) = x^s/s` through special means.
//!
//! ```
//! use hadamard_core::{bound_t1, EndpointDerivatives};
//!
//! let d = EndpointDerivatives::unit();
//! assert_eq!(bound_t1(&d, 0.5, 0.5, 1.5).unwrap(), 0.25);
//! ```

pub mod bounds;
pub mod certify;
pub mod error;
pub mod funcspec;
pub mod kernel;
pub mod power_means;
pub mod quadrature;
pub mod sampling;
pub mod tuner;

pub use bounds::{
    bound, bound_t1, bound_t2, bound_t3, bound_t4, hh_lhs, lemma1_residual, verdict, verdict_with, BoundReport,
    Grids, Mode, ParamSet, Regime, Theorem,
};
pub use certify::{Counterexample, Property, SampledCertificate, Verdict};
pub use error::{Error, Result};
pub use funcspec::FunctionSpec;
pub use kernel::{alpha, g1, g2, EndpointDerivatives, MeanKind};
pub use quadrature::{integrate, QuadResult};
pub use sampling::{power_samples, Family, PowerSample, SweepRanges};
pub use tuner::{tightness_rank, tune_mu, tune_p, RankEntry, TuneResult};
