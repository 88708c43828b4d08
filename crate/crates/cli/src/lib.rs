//! Library side of the `qst` command: configuration, output formats and the
//! subcommand drivers.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{execute, Status};
pub use config::{Cli, CommandKind, RunConfig};

use qst_core::QstError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] QstError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for invalid input, 1 for runtime failures. Help and version
    /// requests surface as `Clap` errors with code 0.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) | CliError::Usage(_) => 2,
            CliError::Core(QstError::EvenChannelLength(_) | QstError::TooManySites { .. }) => 2,
            _ => 1,
        }
    }
}
