use std::fmt;
use std::path::PathBuf;

/// A configuration problem located by a JSON pointer into the config document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub pointer: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(pointer: &str, message: impl Into<String>) -> Self {
        Self { pointer: pointer.to_string(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{at}: {}", self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("config error at {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Config(Vec<ConfigError>),
    #[error("solver aborted during {context}: {source}")]
    Solver { context: String, source: anisons_core::Error },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

impl AppError {
    pub fn config(pointer: &str, message: impl Into<String>) -> Self {
        AppError::Config(vec![ConfigError::new(pointer, message)])
    }

    /// Wraps a core error. Errors that reject parameters count as config
    /// errors at `pointer`; the rest are solver aborts.
    pub fn core(pointer: &str, context: &str, e: anisons_core::Error) -> Self {
        use anisons_core::Error as E;
        match e {
            E::InvalidGrid(_) | E::InvalidCutoff(_) | E::InadmissibleData(_) | E::InvalidConfig(_) => {
                AppError::config(pointer, e.to_string())
            }
            e => AppError::Solver { context: context.to_string(), source: e },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => EXIT_CONFIG,
            AppError::Solver { .. } => EXIT_SOLVER,
            AppError::Verification(_) => EXIT_VERIFY,
            AppError::Io { .. } | AppError::Format { .. } => EXIT_IO,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
