//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WkbError {
    #[error("substitution left the Laurent ring: {0}")]
    NonLaurentResult(String),

    #[error("the series is not Borel summable in this direction: {0}")]
    NotSummable(String),

    #[error("numerical iteration failed to converge: {0}")]
    NoConvergence(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("requested object is undefined here: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, WkbError>;
