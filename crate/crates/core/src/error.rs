use thiserror::Error;

/// Errors raised by the numerical kernels and their front ends.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller violated a precondition (dimension mismatch, band violation, short trace).
    #[error("usage error: {0}")]
    Usage(String),

    /// The requested oracle does not support this domain variant.
    #[error("capability error: {method} does not support domain {domain}")]
    Capability { method: &'static str, domain: String },

    /// Adaptive refinement ran out of budget before meeting the tolerance.
    #[error("accuracy error: estimate {estimate} with error {abs_error} after {panels} panels")]
    Accuracy {
        estimate: f64,
        abs_error: f64,
        panels: usize,
    },

    #[error("degenerate sampling: no accepted points out of {samples}")]
    DegenerateSampling { samples: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
