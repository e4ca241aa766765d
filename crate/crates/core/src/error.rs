//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong when building or running an experiment.
#[derive(Debug, Error)]
pub enum Error {
    /// A kernel failed validation; the message lists every violation found.
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// A caller-supplied parameter is out of range or inconsistent.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A kernel file, DIMACS file, or edge list could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
