use thiserror::Error;

/// Errors raised by the laboratory. The variants map onto the CLI exit-code
/// taxonomy: usage (2), resource (3), construction (4).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("resource error: materializing level {level} needs {needed} cells, budget is {budget}")]
    Resource { level: u32, needed: u64, budget: u64 },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("empty set: {0}")]
    EmptySet(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
