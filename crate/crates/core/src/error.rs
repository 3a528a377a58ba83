use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// An instance exceeded one of the size guards.
    #[error("capacity exceeded: {what} is {actual}, limit {limit}")]
    Capacity {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    /// A numerical routine failed to converge or lost feasibility.
    #[error("numeric failure after {iterations} iterations: {message}")]
    Numeric { message: String, iterations: usize },

    /// The requested operation is not supported for this input kind.
    #[error("unsupported: {0}")]
    Capability(String),

    /// A text input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An estimator failed on one bootstrap resample.
    #[error("estimator failed on resample {index}: {source}")]
    Resample {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    /// True when the error (or the error it wraps) is a capacity violation.
    pub fn is_capacity(&self) -> bool {
        match self {
            Error::Capacity { .. } => true,
            Error::Resample { source, .. } => source.is_capacity(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
