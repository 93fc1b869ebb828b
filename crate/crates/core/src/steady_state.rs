//! Self-consistent operating points of the driven cavity and mirror.
//!
//! Eliminating the mirror displacement `x_s = −g_l I/(ω_m + 2 g_q I)` turns
//! the coupled steady-state equations into one scalar condition on the
//! intracavity photon number `I`:
//!
//! ```text
//! I · (κ² + δ(I)²) = ε²,     δ(I) = Δ + g_l x_s(I) + g_q · q(I)
//! ```
//!
//! where `q` is either `(x²)_s` or `x_s²` depending on the
//! [`DetuningConvention`]. Every sign change of that function on a
//! geometric grid is bracketed, bisected and polished with Newton steps.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Which square of the displacement enters the cavity detuning.
///
/// The field equation for the mean amplitude shifts the detuning by
/// `g_q (x²)_s`, while the linearised fluctuation dynamics use `g_q x_s²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetuningConvention {
    /// `(x²)_s` in the amplitude equation, `x_s²` in the fluctuation matrix.
    #[default]
    AsPrinted,
    /// `x_s²` in both.
    UnifiedXs2,
    /// `(x²)_s` in both.
    UnifiedX2s,
}

impl DetuningConvention {
    pub const ALL: [DetuningConvention; 3] = [
        DetuningConvention::AsPrinted,
        DetuningConvention::UnifiedXs2,
        DetuningConvention::UnifiedX2s,
    ];

    fn steady_uses_bilinear(self) -> bool {
        !matches!(self, DetuningConvention::UnifiedXs2)
    }

    fn fluctuation_uses_bilinear(self) -> bool {
        matches!(self, DetuningConvention::UnifiedX2s)
    }
}

impl fmt::Display for DetuningConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetuningConvention::AsPrinted => "as-printed",
            DetuningConvention::UnifiedXs2 => "unified-xs2",
            DetuningConvention::UnifiedX2s => "unified-x2s",
        })
    }
}

impl FromStr for DetuningConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "as-printed" => Ok(DetuningConvention::AsPrinted),
            "unified-xs2" => Ok(DetuningConvention::UnifiedXs2),
            "unified-x2s" => Ok(DetuningConvention::UnifiedX2s),
            _ => Err(format!(
                "unknown detuning convention `{s}` (expected as-printed, unified-xs2 or unified-x2s)"
            )),
        }
    }
}

/// Steady-state second moments `⟨x²⟩`, `⟨p²⟩`, `⟨xp + px⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bilinears {
    pub x2_s: f64,
    pub p2_s: f64,
    pub xpx_s: f64,
}

/// One self-consistent operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Index in the intensity-sorted list of physical branches.
    pub branch_id: usize,
    pub a_s: Complex64,
    /// `I = |a_s|²`.
    pub intensity: f64,
    pub x_s: f64,
    pub p_s: f64,
    pub x2_s: f64,
    pub p2_s: f64,
    pub xpx_s: f64,
    /// `ω̃_m = ω_m + 2 g_q I` (rad/s).
    pub omega_m_tilde: f64,
    /// Detuning seen by the fluctuations (rad/s).
    pub delta_tilde: f64,
    /// Detuning used in the amplitude equation (rad/s).
    pub cavity_detuning: f64,
    /// `G̃ = g_l + 2 g_q x_s` (rad/s).
    pub g_tilde: f64,
    /// `X_s = (a_s + a_s*)/√2`.
    pub field_x: f64,
    /// `P_s = (a_s − a_s*)/(√2 i)`.
    pub field_p: f64,
}

/// A root of the scalar balance that does not describe a confining spring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectedRoot {
    pub intensity: f64,
    pub omega_m_tilde: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadySolution {
    /// Physical branches, sorted by intensity.
    pub branches: Vec<SteadyState>,
    /// Roots with `ω̃_m ≤ 0`.
    pub rejected: Vec<RejectedRoot>,
}

/// Lowest intensity scanned for roots (photons), unless the drive is so weak
/// that the root sits below it.
pub const GRID_MIN_INTENSITY: f64 = 1e-6;
/// Highest intensity scanned for roots (photons).
pub const GRID_MAX_INTENSITY: f64 = 1e12;
const POINTS_PER_DECADE: f64 = 48.0;
const BISECTION_RTOL: f64 = 1e-12;
const CLOSEST_POLE_APPROACH: f64 = 1e-12;

/// `ω̃_m/ω_m = 1 + 2 g_q I/ω_m`, the light-induced change of the spring
/// constant.
pub fn normalized_spring(params: &SystemParams, intensity: f64) -> f64 {
    1.0 + 2.0 * params.g_q * intensity / params.omega_m
}

/// Displacement `x_s(I)` (may be evaluated beyond the spring inversion).
fn displacement(params: &SystemParams, intensity: f64) -> f64 {
    -params.g_l * intensity / (params.omega_m + 2.0 * params.g_q * intensity)
}

fn x2_unchecked(params: &SystemParams, intensity: f64) -> f64 {
    let w = params.omega_m + 2.0 * params.g_q * intensity;
    let x = params.g_l * intensity / w;
    x * x + params.omega_m * (1.0 + 2.0 * params.n_th) / w
}

/// Steady-state second moments at intensity `I`.
pub fn bilinear_steady_state(params: &SystemParams, intensity: f64) -> Result<Bilinears> {
    let w = params.omega_m + 2.0 * params.g_q * intensity;
    if w.is_nan() || w <= 0.0 {
        return Err(Error::InvertedSpring { omega_m_tilde: w });
    }
    Ok(Bilinears {
        x2_s: x2_unchecked(params, intensity),
        p2_s: 1.0 + 2.0 * params.n_th,
        xpx_s: 0.0,
    })
}

/// Detuning entering the amplitude equation at intensity `I`.
fn cavity_detuning(params: &SystemParams, intensity: f64) -> f64 {
    let x = displacement(params, intensity);
    let square = if params.detuning_convention.steady_uses_bilinear() {
        x2_unchecked(params, intensity)
    } else {
        x * x
    };
    params.delta + params.g_l * x + params.g_q * square
}

fn cavity_detuning_derivative(params: &SystemParams, intensity: f64) -> f64 {
    let w = params.omega_m + 2.0 * params.g_q * intensity;
    let x = displacement(params, intensity);
    let dx = -params.g_l * params.omega_m / (w * w);
    let mut dsq = 2.0 * x * dx;
    if params.detuning_convention.steady_uses_bilinear() {
        dsq -= 2.0 * params.g_q * params.omega_m * (1.0 + 2.0 * params.n_th) / (w * w);
    }
    params.g_l * dx + params.g_q * dsq
}

/// Scalar balance `I (κ² + δ²)/ε² − 1`.
fn balance(params: &SystemParams, intensity: f64) -> f64 {
    let d = cavity_detuning(params, intensity);
    intensity * (params.kappa * params.kappa + d * d) / (params.epsilon * params.epsilon) - 1.0
}

fn balance_derivative(params: &SystemParams, intensity: f64) -> f64 {
    let d = cavity_detuning(params, intensity);
    let dd = cavity_detuning_derivative(params, intensity);
    (params.kappa * params.kappa + d * d + 2.0 * intensity * d * dd)
        / (params.epsilon * params.epsilon)
}

fn geometric(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let decades = (hi / lo).log10().max(0.0);
    let n = ((decades * POINTS_PER_DECADE).ceil() as usize).max(2);
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(move |k| if k == n - 1 { hi } else { lo * (step * k as f64).exp() })
}

/// Scan grid covering `[lo, 1e12]`, refined on both sides of the spring
/// inversion when `g_q < 0`.
fn scan_grid(params: &SystemParams, lo: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = geometric(lo, GRID_MAX_INTENSITY).collect();
    if params.g_q < 0.0 {
        let pole = params.omega_m / (2.0 * params.g_q.abs());
        if pole < GRID_MAX_INTENSITY {
            for d in geometric(CLOSEST_POLE_APPROACH, 0.5) {
                grid.push(pole * (1.0 - d));
                grid.push(pole * (1.0 + d));
            }
            grid.retain(|&i| (i / pole - 1.0).abs() >= 0.5 * CLOSEST_POLE_APPROACH);
        }
    }
    grid.retain(|&i| i >= lo && i <= GRID_MAX_INTENSITY);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn refine_root(params: &SystemParams, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = balance(params, lo);
    for _ in 0..400 {
        if hi - lo <= BISECTION_RTOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = balance(params, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // damped Newton polish inside the final bracket
    let mut x = 0.5 * (lo + hi);
    let mut fx = balance(params, x);
    for _ in 0..6 {
        let d = balance_derivative(params, x);
        if !(d.is_finite() && d != 0.0) {
            break;
        }
        let mut step = fx / d;
        let mut accepted = false;
        for _ in 0..8 {
            let trial = x - step;
            if trial >= lo && trial <= hi {
                let ft = balance(params, trial);
                if ft.abs() < fx.abs() {
                    x = trial;
                    fx = ft;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted || fx == 0.0 {
            break;
        }
    }
    x
}

impl SteadyState {
    /// Builds the operating point at a given intensity. The amplitude phase
    /// follows `a_s = ε/(κ + iδ)` with `|a_s|² = I` exactly.
    pub fn from_intensity(params: &SystemParams, intensity: f64, branch_id: usize) -> Result<Self> {
        let bilinears = bilinear_steady_state(params, intensity)?;
        let omega_m_tilde = params.omega_m + 2.0 * params.g_q * intensity;
        let x_s = displacement(params, intensity);
        let cavity = cavity_detuning(params, intensity);
        let square = if params.detuning_convention.fluctuation_uses_bilinear() {
            bilinears.x2_s
        } else {
            x_s * x_s
        };
        let delta_tilde = params.delta + params.g_l * x_s + params.g_q * square;
        let phase = Complex64::new(params.kappa, -cavity);
        let a_s = if intensity > 0.0 {
            phase / phase.norm() * intensity.sqrt()
        } else {
            Complex64::new(0.0, 0.0)
        };
        let sqrt2 = std::f64::consts::SQRT_2;
        Ok(SteadyState {
            branch_id,
            a_s,
            intensity,
            x_s,
            p_s: 0.0,
            x2_s: bilinears.x2_s,
            p2_s: bilinears.p2_s,
            xpx_s: bilinears.xpx_s,
            omega_m_tilde,
            delta_tilde,
            cavity_detuning: cavity,
            g_tilde: params.g_l + 2.0 * params.g_q * x_s,
            field_x: sqrt2 * a_s.re,
            field_p: sqrt2 * a_s.im,
        })
    }

    pub fn normalized_spring(&self, params: &SystemParams) -> f64 {
        self.omega_m_tilde / params.omega_m
    }

    /// Relative residuals of the displacement equation and of the
    /// amplitude equation.
    pub fn residuals(&self, params: &SystemParams) -> (f64, f64) {
        let x_expected = -params.g_l * self.intensity
            / (params.omega_m + 2.0 * params.g_q * self.intensity);
        let r_x = if x_expected == 0.0 {
            self.x_s.abs()
        } else {
            ((self.x_s - x_expected) / x_expected).abs()
        };
        let square = if params.detuning_convention.steady_uses_bilinear() {
            self.x2_s
        } else {
            self.x_s * self.x_s
        };
        let d = params.delta + params.g_l * self.x_s + params.g_q * square;
        let expected = Complex64::new(params.epsilon, 0.0) / Complex64::new(params.kappa, d);
        let r_a = if self.intensity == 0.0 {
            expected.norm()
        } else {
            (self.a_s - expected).norm() / self.a_s.norm()
        };
        (r_x, r_a)
    }
}

/// All physical (ω̃_m > 0) branches sorted by intensity, plus the rejected
/// roots.
pub fn solve_steady_state_detailed(params: &SystemParams) -> Result<SteadySolution> {
    if params.epsilon == 0.0 {
        return Ok(SteadySolution {
            branches: vec![SteadyState::from_intensity(params, 0.0, 0)?],
            rejected: Vec::new(),
        });
    }
    let weak = params.epsilon * params.epsilon
        / (params.kappa * params.kappa + params.delta * params.delta);
    let lo = GRID_MIN_INTENSITY.min(1e-3 * weak);
    let grid = scan_grid(params, lo);
    let values: Vec<f64> = grid.iter().map(|&i| balance(params, i)).collect();

    let mut roots = Vec::new();
    for k in 0..grid.len() - 1 {
        let (fa, fb) = (values[k], values[k + 1]);
        if !(fa.is_finite() && fb.is_finite()) {
            continue;
        }
        if fa == 0.0 {
            roots.push(grid[k]);
        } else if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            roots.push(refine_root(params, grid[k], grid[k + 1]));
        }
    }
    if let (Some(&last), Some(&f_last)) = (grid.last(), values.last()) {
        if f_last == 0.0 {
            roots.push(last);
        }
    }

    let mut branches = Vec::new();
    let mut rejected = Vec::new();
    for intensity in roots {
        let w = params.omega_m + 2.0 * params.g_q * intensity;
        if w > 0.0 {
            branches.push(SteadyState::from_intensity(params, intensity, branches.len())?);
        } else {
            rejected.push(RejectedRoot {
                intensity,
                omega_m_tilde: w,
            });
        }
    }
    if branches.is_empty() {
        return Err(Error::NoPhysicalBranch {
            rejected: rejected.iter().map(|r| r.intensity).collect(),
        });
    }
    Ok(SteadySolution { branches, rejected })
}

/// All physical branches sorted by intensity.
pub fn solve_steady_state(params: &SystemParams) -> Result<Vec<SteadyState>> {
    solve_steady_state_detailed(params).map(|s| s.branches)
}
