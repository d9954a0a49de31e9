use std::path::PathBuf;

use dapt_core::Error as CoreError;

pub mod exit {
    pub const OK: u8 = 0;
    pub const CONFIG: u8 = 2;
    pub const IO: u8 = 3;
    pub const GAP_COLLAPSE: u8 = 4;
    pub const DEGENERACY_CHANGED: u8 = 5;
    pub const INSUFFICIENT_SWEEP: u8 = 6;
    pub const OTHER: u8 = 7;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: CoreError,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("sweep needs at least 4 distinct values spanning one decade, got {0:?}")]
    InsufficientSweep(Vec<f64>),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Io { .. } | CliError::Input { .. } | CliError::Csv { .. } => exit::IO,
            CliError::InsufficientSweep(_) => exit::INSUFFICIENT_SWEEP,
            CliError::Core(e) => match e {
                CoreError::GapCollapse { .. } => exit::GAP_COLLAPSE,
                CoreError::DegeneracyChanged { .. } => exit::DEGENERACY_CHANGED,
                CoreError::Io(_) | CoreError::Parse { .. } => exit::IO,
                CoreError::InvalidParameter(_) => exit::CONFIG,
                _ => exit::OTHER,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
