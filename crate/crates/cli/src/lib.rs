//! Batch experiments over the `tpc-harq` library: every subcommand of the
//! `tpc-harq` binary is a function here returning typed rows, plus the
//! plumbing that writes them as CSV next to a JSON run manifest.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{Experiment, ExperimentConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config keys or values. Exit status 1.
    #[error("usage: {0}")]
    Usage(String),
    /// The experiment failed while running. Exit status 2.
    #[error(transparent)]
    Runtime(#[from] tpc_harq::Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) | CliError::Output { .. } => 2,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.into())
    }
}
