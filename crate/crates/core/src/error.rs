use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit class:
/// `Capacity`, `Range`, `Domain`, `Precondition`, `Parse` and
/// `InsufficientData` are caller mistakes, `Numeric` is an internal failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("precision too low: {0}")]
    Precision(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for errors caused by the inputs rather than by the computation.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
