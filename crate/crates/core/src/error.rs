//! Error type shared by all compute modules.

use thiserror::Error;

/// Errors produced by setup validation and the numerical engines.
#[derive(Debug, Clone, Error)]
pub enum SpdcError {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration object is inconsistent or incomplete.
    #[error("configuration error: {0}")]
    Config(String),

    /// An index or degree exceeds the supported range.
    #[error("out of supported range: {0}")]
    Range(String),

    /// Panel refinement stopped before the requested relative tolerance
    /// was reached. `estimate` is the relative change of the last step.
    #[error("quadrature did not converge: last relative change {estimate:.3e}")]
    Convergence { estimate: f64 },

    /// A coverage target cannot be met by the truncated data.
    #[error("coverage {requested} unreachable at this truncation (achieved {achieved:.6})")]
    Truncation { requested: f64, achieved: f64 },
}

pub type Result<T> = std::result::Result<T, SpdcError>;
