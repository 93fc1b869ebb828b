//! Point reports, parameter sweeps and figure datasets built on
//! `optosqueeze-core`.

pub mod eval;
pub mod figure;
pub mod report;
pub mod sweep;

use thiserror::Error;

pub use eval::{evaluate, BranchEval, EvalOptions, PointEval, VarianceMethod};
pub use figure::{compute_figure, run_figure, FigureTask};
pub use report::{run_point, spectrum_csv, PointReport};
pub use sweep::{run_sweep, Axis, BranchPolicy, Quantity, Scale, SweepResult, SweepRow, SweepSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no stable steady-state branch")]
    NoStableBranch,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NoStableBranch => 3,
            CliError::Numeric(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<optosqueeze_core::Error> for CliError {
    fn from(e: optosqueeze_core::Error) -> Self {
        match e {
            optosqueeze_core::Error::Config { .. } => CliError::Config(e.to_string()),
            optosqueeze_core::Error::NoPhysicalBranch { .. } => CliError::NoStableBranch,
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<optosqueeze_core::ConfigFileError> for CliError {
    fn from(e: optosqueeze_core::ConfigFileError) -> Self {
        CliError::Config(e.to_string())
    }
}
