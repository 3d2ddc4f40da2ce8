//! Experiment harness around the solver library: config parsing, dataset
//! generation and serialization, the method runner, worker-scaling
//! benchmarks, and plot-ready aggregation of result files.

pub mod bench;
pub mod config;
pub mod csvio;
pub mod dataset;
pub mod plot;
pub mod runner;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config file or command arguments. Exit code 1.
    #[error("config error: {0}")]
    Config(String),
    /// Anything that fails after the config was accepted. Exit code 2.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<tvgl::Error> for CliError {
    fn from(e: tvgl::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
