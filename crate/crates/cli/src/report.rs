//! Single-point text report.

use std::fmt::Write as _;

use optosqueeze_core::{SpectrumPoint, SystemConfig, VarianceResult};

use crate::eval::{evaluate, spectral_model, BranchEval, EvalOptions, PointEval};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct PointReport {
    pub text: String,
    pub point: PointEval,
}

impl PointReport {
    pub fn selected(&self) -> Option<&BranchEval> {
        self.point.selected()
    }

    /// Error to exit with once the report has been printed.
    pub fn outcome(&self) -> Result<(), CliError> {
        match self.selected() {
            None => Err(CliError::NoStableBranch),
            Some(b) => match b.failure() {
                Some(e) => Err(CliError::Numeric(e.to_string())),
                None => Ok(()),
            },
        }
    }
}

fn variance_line(out: &mut String, v: &VarianceResult) {
    let _ = write!(
        out,
        "    {:<24} var_x = {:.6}  var_p = {:.6}  squeeze_x = {:.3} dB  squeeze_p = {:.3} dB  product = {:.6}",
        v.method.to_string(),
        v.var_x,
        v.var_p,
        v.squeeze_x_db,
        v.squeeze_p_db,
        v.uncertainty_product
    );
    if v.cutoff_dependent {
        out.push_str("  [cutoff-dependent]");
    }
    if !v.quasiresonant_valid {
        out.push_str("  [outside quasiresonant validity]");
    }
    if !v.heisenberg_ok() {
        out.push_str("  [below Heisenberg bound]");
    }
    out.push('\n');
}

pub fn run_point(config: &SystemConfig, options: &EvalOptions) -> Result<PointReport, CliError> {
    let point = evaluate(config, options)?;
    let p = &point.params;
    let mut out = String::new();
    let _ = writeln!(out, "input_power_w = {}", config.input_power);
    let _ = writeln!(out, "quadratic_ratio = {}", config.quadratic_ratio);
    let _ = writeln!(out, "detuning_convention = {}", config.detuning_convention);
    let _ = writeln!(out, "thermal_mode = {}", options.model.thermal_noise);
    let _ = writeln!(out, "n_th = {:.6}", p.n_th);
    let _ = writeln!(out, "drive_rate_per_s = {:e}", p.epsilon);
    let _ = writeln!(out, "branches = {}", point.branches.len());
    for b in &point.branches {
        let s = &b.steady;
        let _ = writeln!(out, "branch {}", s.branch_id);
        let _ = writeln!(out, "    intensity = {:e}  x_s = {:e}", s.intensity, s.x_s);
        let _ = writeln!(
            out,
            "    normalized_spring = {:.9}  delta_tilde = {:e} rad/s  g_tilde = {:e} rad/s",
            b.normalized_spring, s.delta_tilde, s.g_tilde
        );
        match &b.stability {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "    rh_stable = {}  eigen_stable = {}  marginal = {}  s1 = {:e}  s2 = {:e}  s3 = {:e}",
                    r.rh_stable, r.eigen_stable, r.marginal, r.s1, r.s2, r.s3
                );
                let eig: Vec<String> = r.eigenvalues.iter().map(|z| format!("{:e}{:+e}i", z.re, z.im)).collect();
                let _ = writeln!(out, "    eigenvalues = [{}]", eig.join(", "));
            }
            Err(e) => {
                let _ = writeln!(out, "    stability: {e}");
            }
        }
        let omega_eff = b.dynamics.omega_eff().map_or("imaginary".to_string(), |w| format!("{w:e}"));
        let _ = writeln!(
            out,
            "    omega_eff = {omega_eff} rad/s  gamma_eff_ratio = {:.6}",
            b.gamma_eff_ratio
        );
        match &b.quadrature {
            Some(Ok(v)) => variance_line(&mut out, v),
            Some(Err(e)) => {
                let _ = writeln!(out, "    quadrature: {e}");
            }
            None => {}
        }
        if let Some(cf) = &b.closed_form {
            variance_line(&mut out, &cf.as_printed);
            variance_line(&mut out, &cf.calibrated);
        }
    }
    match point.selected() {
        Some(b) => {
            let _ = writeln!(out, "selected_branch = {}", b.steady.branch_id);
        }
        None => out.push_str("selected_branch = none (no stable branch)\n"),
    }
    Ok(PointReport { text: out, point })
}

/// `S_xx`/`S_pp` of the selected branch on `points` log-spaced frequencies
/// between `ω_m/100` and `100 ω_m`.
pub fn spectrum_csv(report: &PointReport, options: &EvalOptions, points: usize) -> Result<String, CliError> {
    let branch = report.selected().ok_or(CliError::NoStableBranch)?;
    let model = spectral_model(&report.point.params, &branch.steady, options);
    let omega_m = report.point.params.omega_m;
    let mut out = String::from(SpectrumPoint::CSV_HEADER);
    out.push('\n');
    let n = points.max(2);
    for k in 0..n {
        let omega = omega_m * 10f64.powf(-2.0 + 4.0 * k as f64 / (n - 1) as f64);
        let row = model.point(omega)?;
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    Ok(out)
}
