//! Quadrature variances of the dimensionless position and momentum, the
//! quasiresonant closed form, and squeezing figures relative to the SQL.

use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::{Integral, Integrator};
use crate::spectra::{SpectralModel, ThermalNoise};

/// Ground-state variance of either dimensionless quadrature.
pub const SQL: f64 = 0.5;

/// Relative slack allowed on `var_x · var_p ≥ 1/4`.
pub const HEISENBERG_RTOL: f64 = 1e-6;

/// Γ_eff/Ω_eff above which the quasiresonant closed form is flagged.
pub const QUASIRESONANT_MAX_DAMPING_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    ClosedFormAsPrinted,
    ClosedFormCalibrated,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Quadrature => "quadrature",
            Method::ClosedFormAsPrinted => "closed-form-as-printed",
            Method::ClosedFormCalibrated => "closed-form-calibrated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceResult {
    pub var_x: f64,
    pub var_p: f64,
    pub method: Method,
    pub squeeze_x_db: f64,
    pub squeeze_p_db: f64,
    pub uncertainty_product: f64,
    pub branch_id: usize,
    /// var_p was integrated up to a finite frequency cutoff.
    pub cutoff_dependent: bool,
    /// Closed forms only; always true for quadrature.
    pub quasiresonant_valid: bool,
}

impl VarianceResult {
    fn new(var_x: f64, var_p: f64, method: Method, branch_id: usize) -> Self {
        let (squeeze_x_db, squeeze_p_db, _) = squeezing_from(var_x, var_p);
        VarianceResult {
            var_x,
            var_p,
            method,
            squeeze_x_db,
            squeeze_p_db,
            uncertainty_product: var_x * var_p,
            branch_id,
            cutoff_dependent: false,
            quasiresonant_valid: true,
        }
    }

    pub fn heisenberg_ok(&self) -> bool {
        self.uncertainty_product >= 0.25 * (1.0 - HEISENBERG_RTOL)
    }
}

/// Both closed-form variants at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub as_printed: VarianceResult,
    pub calibrated: VarianceResult,
    /// Factor applied to `as_printed` to get `calibrated`.
    pub calibration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeatsThreeDb {
    pub x: bool,
    pub p: bool,
}

/// `(dB_x, dB_p, beats_3db)` with `dB = −10 log10(var/SQL)`.
pub fn squeezing_metrics(result: &VarianceResult) -> (f64, f64, BeatsThreeDb) {
    squeezing_from(result.var_x, result.var_p)
}

fn squeezing_from(var_x: f64, var_p: f64) -> (f64, f64, BeatsThreeDb) {
    let db = |v: f64| -10.0 * (v / SQL).log10();
    let beats = BeatsThreeDb {
        x: var_x < 0.5 * SQL,
        p: var_p < 0.5 * SQL,
    };
    (db(var_x), db(var_p), beats)
}

/// Split points on `[0, ∞)` around every response pole and the
/// quasiresonance frequency.
fn knots(model: &SpectralModel) -> Result<(Vec<f64>, f64)> {
    let poles = model.response_poles()?;
    let mut points = vec![0.0];
    let mut scale = 0.0f64;
    for z in &poles {
        let centre = z.re.abs();
        let width = z.im.abs();
        scale = scale.max(z.norm());
        for k in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
            for s in [-1.0, 1.0] {
                let w = centre + s * k * width;
                if w > 0.0 {
                    points.push(w);
                }
            }
        }
    }
    let c = &model.coefficients;
    points.push(model.quasiresonance_frequency());
    points.push(c.delta_tilde.abs());
    if let Some(w) = model.quasiresonant_dynamics().omega_eff() {
        points.push(w);
    }
    points.retain(|w| w.is_finite());
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
    if scale == 0.0 || !scale.is_finite() {
        scale = c.omega_m;
    }
    let last = *points.last().unwrap_or(&0.0);
    points.push(2.0 * last.max(scale));
    Ok((points, scale))
}

/// `(1/2π)∫ S dω` over the whole line, using evenness, normalised so that
/// a flat-noise undriven oscillator sits at `n_th + 1/2`.
fn full_line(integral: Integral) -> f64 {
    integral.value / std::f64::consts::PI
}

/// Numerical variances. Refuses unstable points; exact-coth momentum is
/// integrated up to the model cutoff and flagged.
pub fn variance_quadrature(model: &SpectralModel) -> Result<VarianceResult> {
    if !model.stability()?.is_stable() {
        return Err(Error::Unstable);
    }
    let integrator = Integrator::default();
    let (points, scale) = knots(model)?;
    let omega_m = model.coefficients.omega_m;
    let sxx = |w: f64| model.s_xx_unchecked(w);
    let spp = |w: f64| {
        let r = w / omega_m;
        r * r * model.s_xx_unchecked(w)
    };

    let var_x = full_line(integrator.integrate_to_infinity(sxx, &points, scale)?);
    let (var_p, cutoff_dependent) = match model.thermal_noise {
        ThermalNoise::FlatMarkovian => {
            (full_line(integrator.integrate_to_infinity(spp, &points, scale)?), false)
        }
        ThermalNoise::ExactCoth => {
            let cutoff = model.frequency_cutoff;
            let mut finite: Vec<f64> = points.iter().copied().filter(|&w| w < cutoff).collect();
            finite.push(cutoff);
            (full_line(integrator.integrate(spp, &finite)?), true)
        }
    };
    let mut result = VarianceResult::new(var_x, var_p, Method::Quadrature, model.branch_id);
    result.cutoff_dependent = cutoff_dependent;
    Ok(result)
}

/// The residue-theorem closed form evaluated with Ω_eff and Γ_eff taken at
/// `√(ω_m ω̃_m)`, exactly as printed.
fn closed_form_raw(model: &SpectralModel) -> (f64, f64, bool) {
    let c = &model.coefficients;
    let dynamics = model.quasiresonant_dynamics();
    let omega_eff_sq = dynamics.omega_eff_sq;
    let gamma = dynamics.gamma_eff;
    let thermal = c.gamma_m * (2.0 * model.n_th + 1.0);
    let excess = gamma - c.gamma_m;
    let cavity = c.kappa * c.kappa + c.delta_tilde * c.delta_tilde;
    // (Γ_eff − γ_m)/(ω_m Δ̃); vanishes with the drive even when Δ̃ = 0
    let backaction = if excess == 0.0 {
        0.0
    } else {
        excess / (c.omega_m * c.delta_tilde)
    };
    let var_x = c.omega_m * c.omega_m / (4.0 * omega_eff_sq * gamma)
        * (thermal + backaction * (cavity + omega_eff_sq));
    let var_p = (thermal + backaction * (cavity + omega_eff_sq - gamma * gamma)) / (4.0 * gamma);
    let valid = omega_eff_sq > 0.0
        && gamma > 0.0
        && gamma < QUASIRESONANT_MAX_DAMPING_RATIO * omega_eff_sq.sqrt()
        && c.kappa <= c.omega_m;
    (var_x, var_p, valid)
}

/// Factor mapping the printed closed form onto the quadrature normalisation,
/// fixed once from the undriven limit.
pub fn closed_form_calibration(model: &SpectralModel) -> f64 {
    let mut undriven = *model;
    undriven.intensity = 0.0;
    undriven.coefficients.field_x = 0.0;
    undriven.coefficients.field_p = 0.0;
    undriven.coefficients.omega_m_tilde = undriven.coefficients.omega_m;
    let (var_x, _, _) = closed_form_raw(&undriven);
    (model.n_th + 0.5) / var_x
}

/// Closed-form variances, as printed and calibrated. Points outside the
/// quasiresonant regime are computed anyway and flagged.
pub fn variance_closed_form(model: &SpectralModel) -> ClosedForm {
    let (var_x, var_p, valid) = closed_form_raw(model);
    let calibration = closed_form_calibration(model);
    let mut as_printed = VarianceResult::new(var_x, var_p, Method::ClosedFormAsPrinted, model.branch_id);
    as_printed.quasiresonant_valid = valid;
    let mut calibrated = VarianceResult::new(
        calibration * var_x,
        calibration * var_p,
        Method::ClosedFormCalibrated,
        model.branch_id,
    );
    calibrated.quasiresonant_valid = valid;
    ClosedForm {
        as_printed,
        calibrated,
        calibration,
    }
}
