//! Scenario runner: configuration files, trajectory records, comparisons and plot scripts.

use thiserror::Error;

mod compare;
mod plot;
mod record;
mod run;
mod scenario;

pub use compare::{compare, sweep, sweep_output, sweep_table, Comparison, ComparisonRow};
pub use plot::{emit_plot_scripts, plot_script};
pub use record::{format_value, RunRecord, Summary};
pub use run::run_scenario;
pub use scenario::{check_key, parse_config, IntegratorId, ProblemId, Scenario, StepControl, CONFIG_KEYS};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {message}")]
    Numerical { message: String, partial: Box<RunRecord> },
    #[error("records belong to different problems: `{expected}` and `{found}`")]
    MismatchedProblem { expected: String, found: String },
    #[error("i/o failure: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) | HarnessError::MismatchedProblem { .. } => 2,
            HarnessError::Numerical { .. } => 3,
            HarnessError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
