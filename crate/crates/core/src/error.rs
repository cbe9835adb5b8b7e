use thiserror::Error;

/// Errors raised across the crate. Each variant carries enough context to
/// locate the offending input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("validation error: {0}")]
    Validation(String),
    /// A configured size cap was exceeded.
    #[error("size error: {what} exceeds cap {cap}")]
    Size { what: String, cap: usize },
    /// A numerical gate failed (non-integral multiplicity, degenerate
    /// diagonalization, rank mismatch).
    #[error("numerical integrity error: {0}")]
    Numerical(String),
    /// A symbol or operator failed its equivariance check.
    #[error("invariance error: {0}")]
    Invariance(String),
    /// Two independent computations of the same quantity disagree.
    #[error("integrity error: {0}")]
    Integrity(String),
    /// Unknown builtin name.
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
