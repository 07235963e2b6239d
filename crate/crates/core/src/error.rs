use thiserror::Error;

/// Errors raised by field construction, p-adic arithmetic and the suites.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("{0} is not p-integral")]
    NotPIntegral(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
