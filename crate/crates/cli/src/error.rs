use hybrid_nlm::PgmError;
use thiserror::Error;

/// Failure classes of the command-line harness.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Image { path: String, source: PgmError },
    #[error("{path}: invalid JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{0}")]
    Numeric(#[from] hybrid_nlm::Error),
}

impl CliError {
    pub const EXIT_USAGE: i32 = 2;
    pub const EXIT_IO: i32 = 3;
    pub const EXIT_NUMERIC: i32 = 4;

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => Self::EXIT_USAGE,
            CliError::Io { .. } | CliError::Image { .. } | CliError::Json { .. } => Self::EXIT_IO,
            CliError::Numeric(_) => Self::EXIT_NUMERIC,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn image(path: impl AsRef<std::path::Path>, source: PgmError) -> Self {
        match source {
            PgmError::Io(e) => Self::io(path, e),
            other => CliError::Image { path: path.as_ref().display().to_string(), source: other },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
