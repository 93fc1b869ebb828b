//! 1D/2D parameter sweeps written as CSV.
//!
//! Rows run over `axis2` (outer) and `axis1` (inner); branch following and
//! fold detection act along `axis1`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use optosqueeze_core::params::NUMERIC_FIELDS;
use optosqueeze_core::{Error, SystemConfig};
use rayon::prelude::*;

use crate::eval::{evaluate, BranchEval, EvalOptions, PointEval, VarianceMethod};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn range(name: &str, lo: f64, hi: f64, points: usize, scale: Scale) -> Result<Axis, CliError> {
        check_name(name)?;
        let bad = |reason: String| CliError::Config(format!("axis `{name}`: {reason}"));
        if points < 2 {
            return Err(bad(format!("needs at least 2 points, got {points}")));
        }
        if !(lo.is_finite() && hi.is_finite()) || lo == hi {
            return Err(bad(format!("degenerate range [{lo}, {hi}]")));
        }
        let last = (points - 1) as f64;
        let values = match scale {
            Scale::Linear => (0..points)
                .map(|k| if k == points - 1 { hi } else { lo + (hi - lo) * k as f64 / last })
                .collect(),
            Scale::Log => {
                if lo <= 0.0 || hi <= 0.0 {
                    return Err(bad("log scale needs positive bounds".into()));
                }
                let (a, b) = (lo.ln(), hi.ln());
                (0..points)
                    .map(|k| match k {
                        0 => lo,
                        k if k == points - 1 => hi,
                        k => (a + (b - a) * k as f64 / last).exp(),
                    })
                    .collect()
            }
        };
        Ok(Axis { name: name.to_string(), values })
    }

    pub fn values(name: &str, values: Vec<f64>) -> Result<Axis, CliError> {
        check_name(name)?;
        if values.is_empty() {
            return Err(CliError::Config(format!("axis `{name}`: empty value list")));
        }
        Ok(Axis { name: name.to_string(), values })
    }

    pub fn header(&self) -> String {
        match SystemConfig::field_unit(&self.name) {
            Some(unit) if !unit.is_empty() => format!("{}_{unit}", self.name),
            _ => self.name.clone(),
        }
    }
}

fn check_name(name: &str) -> Result<(), CliError> {
    if NUMERIC_FIELDS.contains(&name) {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "unknown sweep parameter `{name}` (expected one of {})",
            NUMERIC_FIELDS.join(", ")
        )))
    }
}

/// `name=lin:LO:HI:N`, `name=log:LO:HI:N` or `name=values:V1,V2,...`.
impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CliError::Config(format!("cannot parse axis `{s}` (expected name=lin:lo:hi:n, name=log:lo:hi:n or name=values:v1,v2)"));
        let (name, spec) = s.split_once('=').ok_or_else(bad)?;
        let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
        let number = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        match kind {
            "lin" | "log" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [lo, hi, n] = parts[..] else { return Err(bad()) };
                let n = n.trim().parse::<usize>().map_err(|_| bad())?;
                let scale = if kind == "lin" { Scale::Linear } else { Scale::Log };
                Axis::range(name.trim(), number(lo)?, number(hi)?, n, scale)
            }
            "values" => {
                let values = rest.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
                Axis::values(name.trim(), values)
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Intensity,
    NormalizedSpring,
    RhStable,
    GammaEffRatio,
    VarX,
    VarP,
    SqueezeDb,
    OmegaEff,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::Intensity,
        Quantity::NormalizedSpring,
        Quantity::RhStable,
        Quantity::GammaEffRatio,
        Quantity::VarX,
        Quantity::VarP,
        Quantity::SqueezeDb,
        Quantity::OmegaEff,
    ];

    fn needs_variances(self) -> bool {
        matches!(self, Quantity::VarX | Quantity::VarP | Quantity::SqueezeDb)
    }

    fn columns(self, method: VarianceMethod) -> Vec<&'static str> {
        let mut out = Vec::new();
        match self {
            Quantity::Intensity => out.push("intensity"),
            Quantity::NormalizedSpring => out.push("normalized_spring"),
            Quantity::RhStable => out.extend(["rh_s1", "rh_s2", "rh_s3", "eigen_stable"]),
            Quantity::GammaEffRatio => out.push("gamma_eff_ratio"),
            Quantity::OmegaEff => out.push("omega_eff_rad_s"),
            Quantity::SqueezeDb => out.extend(["squeeze_x_db", "squeeze_p_db"]),
            Quantity::VarX | Quantity::VarP => {
                let x = self == Quantity::VarX;
                if method.quadrature() {
                    out.push(if x { "var_x" } else { "var_p" });
                }
                if method.closed_form() {
                    out.push(if x { "var_x_cf" } else { "var_p_cf" });
                    out.push(if x { "var_x_cf_printed" } else { "var_p_cf_printed" });
                }
            }
        }
        out
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Intensity => "I",
            Quantity::NormalizedSpring => "normalized_spring",
            Quantity::RhStable => "rh_stable",
            Quantity::GammaEffRatio => "gamma_eff_ratio",
            Quantity::VarX => "var_x",
            Quantity::VarP => "var_p",
            Quantity::SqueezeDb => "squeeze_db",
            Quantity::OmegaEff => "omega_eff",
        })
    }
}

impl FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.to_string() == s.trim())
            .ok_or_else(|| CliError::Config(format!("unknown quantity `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchPolicy {
    /// A row for every branch.
    #[default]
    All,
    /// A single row per point, continuing the previous point's branch.
    Followed,
}

impl FromStr for BranchPolicy {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(BranchPolicy::All),
            "followed" => Ok(BranchPolicy::Followed),
            _ => Err(CliError::Config(format!("unknown branch policy `{s}` (expected all or followed)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub quantities: Vec<Quantity>,
    pub base: SystemConfig,
    pub policy: BranchPolicy,
    /// Constant SQL reference column.
    pub sql_column: bool,
}

impl SweepSpec {
    pub fn new(axis1: Axis, quantities: Vec<Quantity>, base: SystemConfig) -> Self {
        SweepSpec {
            axis1,
            axis2: None,
            quantities,
            base,
            policy: BranchPolicy::All,
            sql_column: false,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.axis1.values.len() * self.axis2.as_ref().map_or(1, |a| a.values.len())
    }

    fn grid(&self) -> Vec<(f64, Option<f64>)> {
        match &self.axis2 {
            None => self.axis1.values.iter().map(|&v| (v, None)).collect(),
            Some(outer) => outer
                .values
                .iter()
                .flat_map(|&o| self.axis1.values.iter().map(move |&v| (v, Some(o))))
                .collect(),
        }
    }

    fn config_at(&self, v1: f64, v2: Option<f64>) -> Result<SystemConfig, Error> {
        let mut config = self.base;
        config.set_field(&self.axis1.name, v1)?;
        if let (Some(axis), Some(v)) = (&self.axis2, v2) {
            config.set_field(&axis.name, v)?;
        }
        Ok(config)
    }

    pub fn header(&self, method: VarianceMethod) -> String {
        let mut cols = vec![self.axis1.header()];
        if let Some(a) = &self.axis2 {
            cols.push(a.header());
        }
        cols.extend(["branch_id", "followed", "fold", "rh_stable", "marginal"].map(String::from));
        for q in &self.quantities {
            cols.extend(q.columns(method).into_iter().map(String::from));
        }
        if self.sql_column {
            cols.push("sql".into());
        }
        cols.push("error".into());
        cols.join(",")
    }
}

/// One CSV row before formatting.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub branch: Option<BranchEval>,
    pub followed: bool,
    pub fold: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub header: String,
    pub rows: Vec<SweepRow>,
    pub method: VarianceMethod,
    quantities: Vec<Quantity>,
    sql_column: bool,
}

fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
    } else {
        s.to_string()
    }
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&self.format_row(row));
            out.push('\n');
        }
        out
    }

    fn format_row(&self, row: &SweepRow) -> String {
        let mut cells = vec![cell(row.axis1)];
        if let Some(v) = row.axis2 {
            cells.push(cell(v));
        }
        let branch = row.branch.as_ref();
        let report = branch.and_then(|b| b.stability.as_ref().ok());
        cells.push(branch.map_or(String::new(), |b| b.steady.branch_id.to_string()));
        cells.push(row.followed.to_string());
        cells.push(row.fold.to_string());
        cells.push(report.map_or(String::new(), |r| r.rh_stable.to_string()));
        cells.push(report.map_or(String::new(), |r| r.marginal.to_string()));
        let quadrature = branch.and_then(|b| b.quadrature.as_ref()).and_then(|r| r.as_ref().ok());
        let closed = branch.and_then(|b| b.closed_form.as_ref());
        for q in &self.quantities {
            let n = q.columns(self.method).len();
            let Some(b) = branch else {
                cells.extend(std::iter::repeat_n(String::new(), n));
                continue;
            };
            match q {
                Quantity::Intensity => cells.push(cell(b.steady.intensity)),
                Quantity::NormalizedSpring => cells.push(cell(b.normalized_spring)),
                Quantity::RhStable => match report {
                    Some(r) => cells.extend([
                        cell(r.s1),
                        cell(r.s2),
                        cell(r.s3),
                        r.eigen_stable.to_string(),
                    ]),
                    None => cells.extend(std::iter::repeat_n(String::new(), n)),
                },
                Quantity::GammaEffRatio => cells.push(cell(b.gamma_eff_ratio)),
                Quantity::OmegaEff => cells.push(b.dynamics.omega_eff().map_or(String::new(), cell)),
                Quantity::SqueezeDb => {
                    let source = quadrature.or(closed.map(|c| &c.calibrated));
                    match source {
                        Some(v) => cells.extend([cell(v.squeeze_x_db), cell(v.squeeze_p_db)]),
                        None => cells.extend([String::new(), String::new()]),
                    }
                }
                Quantity::VarX | Quantity::VarP => {
                    let pick = |v: &optosqueeze_core::VarianceResult| {
                        cell(if *q == Quantity::VarX { v.var_x } else { v.var_p })
                    };
                    if self.method.quadrature() {
                        cells.push(quadrature.map_or(String::new(), pick));
                    }
                    if self.method.closed_form() {
                        cells.push(closed.map_or(String::new(), |c| pick(&c.calibrated)));
                        cells.push(closed.map_or(String::new(), |c| pick(&c.as_printed)));
                    }
                }
            }
        }
        if self.sql_column {
            cells.push(cell(optosqueeze_core::SQL));
        }
        cells.push(row.error.as_deref().map_or(String::new(), csv_escape));
        let mut line = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let _ = write!(line, "{c}");
        }
        line
    }
}

/// Index of the branch closest in log-intensity to `previous`.
fn follow(branches: &[BranchEval], previous: Option<f64>) -> Option<usize> {
    if branches.is_empty() {
        return None;
    }
    let Some(prev) = previous else { return Some(0) };
    let distance = |i: f64| {
        if i > 0.0 && prev > 0.0 {
            (i.ln() - prev.ln()).abs()
        } else {
            (i - prev).abs() / i.max(prev).max(f64::MIN_POSITIVE)
        }
    };
    (0..branches.len()).min_by(|&a, &b| {
        distance(branches[a].steady.intensity).total_cmp(&distance(branches[b].steady.intensity))
    })
}

fn describe(e: &Error) -> String {
    e.to_string()
}

/// Evaluates the grid on a pool of `workers` threads (0 = all cores).
pub fn run_sweep(spec: &SweepSpec, options: &EvalOptions, workers: usize) -> Result<SweepResult, CliError> {
    let mut options = *options;
    options.skip_variances = !spec.quantities.iter().any(|q| q.needs_variances());
    let grid = spec.grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Numeric(format!("cannot start worker pool: {e}")))?;
    let evaluated: Vec<Result<PointEval, Error>> = pool.install(|| {
        grid.par_iter()
            .map(|&(v1, v2)| spec.config_at(v1, v2).and_then(|c| evaluate(&c, &options)))
            .collect()
    });

    let inner = spec.axis1.values.len();
    let mut rows = Vec::new();
    let mut previous_intensity = None;
    let mut previous_count = None;
    for (k, (&(v1, v2), point)) in grid.iter().zip(evaluated).enumerate() {
        if k % inner == 0 {
            previous_intensity = None;
            previous_count = None;
        }
        match point {
            Err(e) => {
                rows.push(SweepRow {
                    axis1: v1,
                    axis2: v2,
                    branch: None,
                    followed: false,
                    fold: false,
                    error: Some(describe(&e)),
                });
                previous_intensity = None;
                previous_count = None;
            }
            Ok(point) => {
                let count = point.branches.len();
                let fold = previous_count.is_some_and(|c| c != count);
                let chosen = follow(&point.branches, previous_intensity);
                previous_intensity = chosen.map(|i| point.branches[i].steady.intensity);
                previous_count = Some(count);
                for (i, b) in point.branches.into_iter().enumerate() {
                    let followed = chosen == Some(i);
                    if spec.policy == BranchPolicy::Followed && !followed {
                        continue;
                    }
                    rows.push(SweepRow {
                        axis1: v1,
                        axis2: v2,
                        error: b.failure().map(describe),
                        branch: Some(b),
                        followed,
                        fold,
                    });
                }
            }
        }
    }
    Ok(SweepResult {
        header: spec.header(options.method),
        rows,
        method: options.method,
        quantities: spec.quantities.clone(),
        sql_column: spec.sql_column,
    })
}
