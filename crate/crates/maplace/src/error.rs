use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const GEOMETRY: i32 = 3;
    pub const SEARCH_BUDGET: i32 = 4;
    pub const IO: i32 = 5;
    pub const VERIFICATION: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] maplace_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Machine-readable identifier printed alongside the message.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Parse { .. } => "parse",
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "io",
            CliError::Verification(_) => "verification",
        }
    }

    pub fn exit_code(&self) -> i32 {
        use maplace_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Parse { .. } => exit::CONFIG,
            CliError::Core(E::InvalidParameter(_)) => exit::CONFIG,
            CliError::Core(E::SearchSpaceTooLarge { .. }) => exit::SEARCH_BUDGET,
            CliError::Core(_) => exit::GEOMETRY,
            CliError::Io { .. } => exit::IO,
            CliError::Verification(_) => exit::VERIFICATION,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
