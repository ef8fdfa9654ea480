//! Failure kinds and their process exit codes.

use std::fmt;

use autossa::SsaError;

/// A failed command. Usage errors (bad flags, missing files, parameters out
/// of range) exit with 2, data errors (unparsable or unusable input, undefined
/// measures) with 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<SsaError> for CliError {
    fn from(e: SsaError) -> Self {
        match e {
            SsaError::Parameter(_) => CliError::Usage(e.to_string()),
            SsaError::Data(_) | SsaError::Degenerate(_) => CliError::Data(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

pub fn data<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Data(msg.into()))
}
