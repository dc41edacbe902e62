use thiserror::Error;

/// Errors raised across the crate.
///
/// Usage errors come from bad caller input, decode errors from malformed
/// encoded hashes, and internal/resource errors from conditions the caller
/// cannot fix by changing arguments.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("decode error: {0}")]
    Decode(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
