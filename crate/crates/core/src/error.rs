use thiserror::Error;

/// Errors produced by the algebra, machine and membership layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation was called with arguments outside its contract
    /// (ring or mode mismatch, degree of zero, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A structural invariant of a value was violated.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A machine file was rejected; `line` is 1-based.
    #[error("machine file, line {line}: {msg}")]
    MachineFile { line: usize, msg: String },

    /// A configured budget or cap would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
