use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: unsupported format: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("{path}: corrupt file: {reason}")]
    CorruptFile { path: PathBuf, reason: String },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("corpus {0} contains no readable images")]
    EmptyCorpus(PathBuf),

    #[error("pipeline: {0}")]
    Pipeline(#[from] lumen::Error),

    #[error("every image in the corpus failed")]
    AllFailed,
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. }
            | CliError::UnsupportedFormat { .. }
            | CliError::CorruptFile { .. }
            | CliError::EmptyCorpus(_) => 2,
            CliError::Config { .. } => 3,
            CliError::Pipeline(_) | CliError::AllFailed => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
