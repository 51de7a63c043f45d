//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by construction, evaluation, and experiment drivers.
///
/// `Hypothesis` is reserved for named theorem-hypothesis failures so that
/// callers (and the CLI exit-code contract) can distinguish a bad
/// configuration from a numerical breakdown.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A named hypothesis of a theorem/experiment failed validation.
    #[error("hypothesis violated: {condition}")]
    Hypothesis { condition: String },

    /// A numerical procedure failed (eigensolve divergence, collapsed
    /// interval, non-finite evaluation, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn hypothesis(condition: impl Into<String>) -> Self {
        Error::Hypothesis {
            condition: condition.into(),
        }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
