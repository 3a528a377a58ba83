use thiserror::Error;

/// Failures of a CLI run, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qrboot::Error),

    #[error("config error in {path}: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("every grid point failed")]
    AllFailed,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_TOTAL_FAILURE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_capacity() => EXIT_CAPACITY,
            CliError::Core(qrboot::Error::Numeric { .. } | qrboot::Error::Resample { .. }) => EXIT_RUNTIME,
            CliError::Core(_) | CliError::Config { .. } => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_RUNTIME,
            CliError::AllFailed => EXIT_TOTAL_FAILURE,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
