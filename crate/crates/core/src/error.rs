use thiserror::Error;

/// Errors produced by embedding, decomposition and the identification methods.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SsaError {
    /// A parameter (window, index, threshold, frequency bound) is out of range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// The input data itself is unusable (non-finite values, too short).
    #[error("invalid data: {0}")]
    Data(String),
    /// A measure is undefined for the given input (zero vector, point at the origin).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, SsaError>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(SsaError::Parameter(msg.into()))
}
