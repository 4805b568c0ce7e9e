use thiserror::Error;

/// Errors raised by evaluation, verification and parsing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported symbol class: {0}")]
    UnsupportedClass(String),
    #[error("not a member: {0}")]
    NonMember(String),
    #[error("integration did not converge: {message} (best estimate {estimate:e})")]
    NoConvergence { message: String, estimate: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
