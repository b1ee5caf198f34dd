use std::path::PathBuf;

use resoloss_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: u64, msg: String },
    #[error("{0}")]
    Input(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl PipelineError {
    pub fn parse(path: &str, line: u64, msg: impl Into<String>) -> Self {
        Self::Parse { path: path.to_string(), line, msg: msg.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit status: 1 input/format, 2 fit/convergence, 3 config.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 3,
            Self::Core(CoreError::Fit { .. } | CoreError::Numerical { .. }) => 2,
            _ => 1,
        }
    }
}
