use std::process::ExitCode;

use grw_core::graph::GraphError;
use grw_core::metrics::MetricsError;
use grw_core::oracle::OracleError;
use grw_core::sim::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 for usage and configuration, 2 for bad input, 3 for simulator faults.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Sim(SimError::Config(_)) => 1,
            CliError::Sim(SimError::Invariant(_) | SimError::Deadlock { .. }) => 3,
            CliError::Oracle(OracleError::Config(_)) => 1,
            _ => 2,
        })
    }
}
