//! Experiment harness for the `mohollm` optimizer: run configuration,
//! crash-safe run logs, manifest sweeps, cross-seed aggregation and plots.

pub mod aggregate;
pub mod config;
pub mod output;
pub mod plot;
pub mod sweep;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// Invalid flags, configuration or manifest.
    #[error("usage: {0}")]
    Usage(String),
    /// The optimizer stopped before the budget was spent.
    #[error("run failed: {0}")]
    Run(String),
    #[error("aggregation: {0}")]
    Aggregate(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// Process exit code: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Usage(_) => 2,
            _ => 1,
        }
    }
}
