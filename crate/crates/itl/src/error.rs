use std::io;

/// Crate-wide error type. Load-time problems carry the offending file and
/// line so batch jobs over large resources fail with an actionable message.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}:{line}: alignment: {msg}")]
    Alignment { path: String, line: usize, msg: String },
    #[error("{path}:{line}: timing: {msg}")]
    Timing { path: String, line: usize, msg: String },
    #[error("domain: {0}")]
    Domain(String),
    #[error("training: {0}")]
    Training(String),
    #[error("metric: {0}")]
    Metric(String),
    #[error("stream: {0}")]
    Stream(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn parse(path: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.to_string(), line, msg: msg.into() }
    }

    pub fn alignment(path: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Alignment { path: path.to_string(), line, msg: msg.into() }
    }

    pub fn timing(path: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Timing { path: path.to_string(), line, msg: msg.into() }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn training(msg: impl Into<String>) -> Self {
        Error::Training(msg.into())
    }

    pub fn metric(msg: impl Into<String>) -> Self {
        Error::Metric(msg.into())
    }

    pub fn stream(msg: impl Into<String>) -> Self {
        Error::Stream(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
