use std::io;
use std::path::PathBuf;

use kfib_balance::Error as CoreError;
use thiserror::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_PRECISION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },

    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("manifest schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("reproduction mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            CliError::FileNotFound(path)
        } else {
            CliError::File { path, source }
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::PrecisionExhausted { .. } | CoreError::Undecided { .. }) => {
                EXIT_PRECISION
            }
            CliError::Core(CoreError::InvariantViolation(_)) | CliError::Mismatch(_) => {
                EXIT_MISMATCH
            }
            _ => EXIT_IO,
        }
    }

    /// Short machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e {
                CoreError::Undecided { .. } => "Undecided",
                CoreError::PrecisionExhausted { .. } => "PrecisionExhausted",
                CoreError::Domain(_) => "DomainError",
                CoreError::InvariantViolation(_) => "InvariantViolation",
                CoreError::Precondition(_) => "PreconditionError",
                CoreError::CacheInvalid(_) => "CacheInvalid",
                CoreError::Parse(_) => "ParseError",
                CoreError::Io(_) => "IoError",
            },
            CliError::File { .. } | CliError::Io(_) => "IoError",
            CliError::FileNotFound(_) => "FileNotFound",
            CliError::SchemaMismatch(_) => "SchemaMismatch",
            CliError::Config(_) => "ConfigError",
            CliError::Json(_) => "JsonError",
            CliError::Mismatch(_) => "Mismatch",
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
