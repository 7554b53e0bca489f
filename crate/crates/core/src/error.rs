use thiserror::Error;

/// Errors raised by the construction and analysis routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KeaneError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A step or digit budget was exhausted.
    #[error("resource budget exceeded: {what} (limit {limit})")]
    Budget { what: String, limit: u64 },
    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

impl KeaneError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        KeaneError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, KeaneError>;
