use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition (bad distribution, bad parameter, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// An encoder, reward or task does not cover the same items as its counterpart.
    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    /// Best-demonstration is undefined when the optimal and worst paths score the same.
    #[error("degenerate task: optimal and worst demonstrations have equal reward {0}")]
    DegenerateTask(f64),

    /// A precondition between related quantities was broken, e.g. a demonstration
    /// scoring outside the [worst, optimal] range.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::SupportMismatch(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
