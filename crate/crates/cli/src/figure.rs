//! Preset sweeps for the four reference datasets.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use optosqueeze_core::SystemConfig;

use crate::eval::EvalOptions;
use crate::sweep::{run_sweep, Axis, BranchPolicy, Quantity, Scale, SweepResult, SweepSpec};
use crate::CliError;

pub const POWER_POINTS: usize = 200;
pub const POWER_RANGE: (f64, f64) = (1e-6, 1e-2);
pub const RATIO_POINTS: usize = 101;
pub const RATIO_RANGE: (f64, f64) = (-0.01, 0.01);
pub const PANEL_RATIOS: [f64; 3] = [-0.01, 0.0, 0.01];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureTask {
    SpringMap,
    IntensityStability,
    DampingMap,
    VarianceCurves,
}

impl FigureTask {
    pub const ALL: [FigureTask; 4] = [
        FigureTask::SpringMap,
        FigureTask::IntensityStability,
        FigureTask::DampingMap,
        FigureTask::VarianceCurves,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FigureTask::SpringMap => "spring-map",
            FigureTask::IntensityStability => "intensity-stability",
            FigureTask::DampingMap => "damping-map",
            FigureTask::VarianceCurves => "variance-curves",
        }
    }

    pub fn spec(self, base: SystemConfig) -> SweepSpec {
        let power = Axis::range("input_power", POWER_RANGE.0, POWER_RANGE.1, POWER_POINTS, Scale::Log)
            .expect("static axis");
        let ratio_map = Axis::range("quadratic_ratio", RATIO_RANGE.0, RATIO_RANGE.1, RATIO_POINTS, Scale::Linear)
            .expect("static axis");
        let panels = Axis::values("quadratic_ratio", PANEL_RATIOS.to_vec()).expect("static axis");
        let (axis2, quantities, sql_column) = match self {
            FigureTask::SpringMap => (ratio_map, vec![Quantity::Intensity, Quantity::NormalizedSpring], false),
            FigureTask::DampingMap => (ratio_map, vec![Quantity::GammaEffRatio], false),
            FigureTask::IntensityStability => (panels, vec![Quantity::Intensity], false),
            FigureTask::VarianceCurves => (
                panels,
                vec![Quantity::Intensity, Quantity::VarX, Quantity::VarP, Quantity::SqueezeDb],
                true,
            ),
        };
        SweepSpec {
            axis1: power,
            axis2: Some(axis2),
            quantities,
            base,
            policy: BranchPolicy::All,
            sql_column,
        }
    }
}

impl fmt::Display for FigureTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FigureTask {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureTask::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| {
                let ids: Vec<&str> = FigureTask::ALL.iter().map(|t| t.id()).collect();
                CliError::Config(format!("unknown figure `{s}` (expected one of {})", ids.join(", ")))
            })
    }
}

pub fn compute_figure(
    task: FigureTask,
    base: SystemConfig,
    options: &EvalOptions,
    workers: usize,
) -> Result<SweepResult, CliError> {
    run_sweep(&task.spec(base), options, workers)
}

/// Writes `<out>/<id>.csv` and returns its path.
pub fn run_figure(
    task: FigureTask,
    base: SystemConfig,
    options: &EvalOptions,
    workers: usize,
    out: &Path,
) -> Result<PathBuf, CliError> {
    let result = compute_figure(task, base, options, workers)?;
    std::fs::create_dir_all(out)?;
    let path = out.join(format!("{}.csv", task.id()));
    std::fs::write(&path, result.to_csv())?;
    Ok(path)
}
