use thiserror::Error;

/// Errors raised by the estimators, tests and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate class: {0}")]
    DegenerateClass(String),

    #[error("degenerate comparison: {0}")]
    DegenerateComparison(String),

    #[error("empty group: {0}")]
    EmptyGroup(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unattainable target: {0}")]
    Unattainable(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema version mismatch: expected {expected}, found {found}")]
    SchemaVersion { expected: u32, found: u32 },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
