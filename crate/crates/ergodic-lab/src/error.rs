//! Library-wide error type.

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// Invalid part, index, or mismatched model.
    Domain(String),
    /// A documented precondition was violated.
    Precondition(String),
    /// Data cannot be represented in the eventually periodic encoding.
    Representation(String),
    /// Malformed input text (rationals, file schemas).
    Parse(String),
    /// A synthesized certificate failed its own re-check.
    Certificate(String),
    /// Invariant breach inside the library; indicates a bug.
    Internal(String),
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::Representation(m) => write!(f, "representation error: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::Certificate(m) => write!(f, "certificate check failed: {m}"),
            Error::Internal(m) => write!(f, "internal error: {m}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Json(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
