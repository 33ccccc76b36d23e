use thiserror::Error;

/// Errors raised by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A log-space exponent does not fit in a finite positive `f64`.
    #[error("overflow: exponent {exponent} is outside the representable range")]
    Overflow { exponent: f64 },

    /// Expression source text could not be parsed.
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax {
        position: usize,
        expected: &'static str,
    },

    /// Evaluating a function produced an undefined or non-finite value.
    #[error("evaluation error: {0}")]
    Eval(String),

    /// Invalid user input (interval, parameter set, configuration).
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
