//! Frequency-domain response of the mirror: transfer coefficients,
//! effective susceptibility, thermal and radiation-pressure noise, and the
//! symmetrised position and momentum spectra.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{SystemParams, HBAR, K_B};
use crate::poly;
use crate::stability::{stability_from_coefficients, FluctuationCoefficients, StabilityReport};
use crate::steady_state::SteadyState;

/// Default exact-coth integration cutoff in units of ω_m.
pub const DEFAULT_CUTOFF_FACTOR: f64 = 1e3;

/// Thermal noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalNoise {
    /// `S_th = (ω γ_m/ω_m) coth(ħω/2k_BT)`.
    ExactCoth,
    /// `S_th = γ_m (2 n_th + 1)` at every frequency.
    #[default]
    FlatMarkovian,
}

impl fmt::Display for ThermalNoise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThermalNoise::ExactCoth => "exact-coth",
            ThermalNoise::FlatMarkovian => "flat",
        })
    }
}

impl FromStr for ThermalNoise {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact-coth" => Ok(ThermalNoise::ExactCoth),
            "flat" | "flat-markovian" => Ok(ThermalNoise::FlatMarkovian),
            _ => Err(format!("unknown thermal mode `{s}` (expected exact-coth or flat)")),
        }
    }
}

/// `D(ω)`, `X_a(ω)`, `X_{a†}(ω)` and `X_ξ(ω)` of
/// `δx = (X_a a_in + X_{a†} a_in† − X_ξ ξ)/D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferCoefficients {
    pub d: Complex64,
    pub x_a: Complex64,
    pub x_adag: Complex64,
    pub x_xi: Complex64,
}

/// Effective mechanical frequency and damping at one response frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveDynamics {
    /// The bracket under the square root of Ω_eff.
    pub omega_eff_sq: f64,
    pub gamma_eff: f64,
}

impl EffectiveDynamics {
    /// `None` when the optical spring pushes Ω_eff² negative.
    pub fn omega_eff(&self) -> Option<f64> {
        (self.omega_eff_sq >= 0.0).then(|| self.omega_eff_sq.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub chi_eff: Complex64,
    pub s_th: f64,
    pub s_rp: f64,
    pub s_xx: f64,
    pub s_pp: f64,
    /// NaN when imaginary.
    pub omega_eff: f64,
    pub gamma_eff: f64,
}

impl SpectrumPoint {
    pub const CSV_HEADER: &'static str =
        "omega_rad_s,s_xx,s_pp,s_th,s_rp,re_chi,im_chi,omega_eff,gamma_eff";

    pub fn csv_row(&self) -> String {
        let omega_eff = if self.omega_eff.is_nan() {
            String::new()
        } else {
            self.omega_eff.to_string()
        };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.omega,
            self.s_xx,
            self.s_pp,
            self.s_th,
            self.s_rp,
            self.chi_eff.re,
            self.chi_eff.im,
            omega_eff,
            self.gamma_eff
        )
    }
}

/// Immutable spectral context of one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralModel {
    pub coefficients: FluctuationCoefficients,
    pub intensity: f64,
    pub a_s: Complex64,
    pub n_th: f64,
    pub temperature: f64,
    pub thermal_noise: ThermalNoise,
    /// Upper limit of exact-coth integrals (rad/s).
    pub frequency_cutoff: f64,
    pub branch_id: usize,
}

impl SpectralModel {
    pub fn new(params: &SystemParams, ss: &SteadyState, thermal_noise: ThermalNoise) -> Self {
        SpectralModel {
            coefficients: FluctuationCoefficients::new(params, ss),
            intensity: ss.intensity,
            a_s: ss.a_s,
            n_th: params.n_th,
            temperature: params.temperature,
            thermal_noise,
            frequency_cutoff: DEFAULT_CUTOFF_FACTOR * params.omega_m,
            branch_id: ss.branch_id,
        }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.frequency_cutoff = cutoff;
        self
    }

    pub fn with_thermal_noise(mut self, mode: ThermalNoise) -> Self {
        self.thermal_noise = mode;
        self
    }

    pub fn stability(&self) -> Result<StabilityReport> {
        stability_from_coefficients(&self.coefficients)
    }

    /// `√(ω_m ω̃_m)`.
    pub fn quasiresonance_frequency(&self) -> f64 {
        (self.coefficients.omega_m * self.coefficients.omega_m_tilde).sqrt()
    }

    /// `2 G̃² I Δ̃ ω_m`, the coupling term shared by D, χ_eff and Ω_eff.
    fn coupling(&self) -> f64 {
        let c = &self.coefficients;
        2.0 * c.g_tilde * c.g_tilde * self.intensity * c.delta_tilde * c.omega_m
    }

    /// `(κ − iω)² + Δ̃²`.
    fn cavity_factor(&self, omega: f64) -> Complex64 {
        let c = &self.coefficients;
        let k = Complex64::new(c.kappa, -omega);
        k * k + c.delta_tilde * c.delta_tilde
    }

    /// `(κ² + (ω − Δ̃)²)(κ² + (ω + Δ̃)²) = |(κ − iω)² + Δ̃²|²`.
    fn sideband_product(&self, omega: f64) -> f64 {
        let c = &self.coefficients;
        let k2 = c.kappa * c.kappa;
        (k2 + (omega - c.delta_tilde).powi(2)) * (k2 + (omega + c.delta_tilde).powi(2))
    }

    pub fn transfer_coefficients(&self, omega: f64) -> TransferCoefficients {
        let c = &self.coefficients;
        let i = Complex64::i();
        let mech = Complex64::new(omega * omega - c.omega_m * c.omega_m_tilde, c.gamma_m * omega);
        let cavity = self.cavity_factor(omega);
        let x_a_at = |w: f64| {
            (2.0 * c.kappa).sqrt() * c.omega_m * c.g_tilde * self.a_s.conj()
                * (c.kappa - i * w - i * c.delta_tilde)
        };
        TransferCoefficients {
            d: cavity * mech + self.coupling(),
            x_a: x_a_at(omega),
            x_adag: x_a_at(-omega).conj(),
            x_xi: c.omega_m * cavity,
        }
    }

    /// Ascending-power coefficients of `D(ω)`.
    pub fn characteristic_polynomial(&self) -> [Complex64; 5] {
        let c = &self.coefficients;
        let cavity = [
            Complex64::new(c.kappa * c.kappa + c.delta_tilde * c.delta_tilde, 0.0),
            Complex64::new(0.0, -2.0 * c.kappa),
            Complex64::new(-1.0, 0.0),
        ];
        let mech = [
            Complex64::new(-c.omega_m * c.omega_m_tilde, 0.0),
            Complex64::new(0.0, c.gamma_m),
            Complex64::new(1.0, 0.0),
        ];
        let mut p = poly::multiply(&cavity, &mech);
        p[0] += self.coupling();
        [p[0], p[1], p[2], p[3], p[4]]
    }

    /// Roots of `D(ω)`: the response poles in the complex ω plane. A stable
    /// point has all of them in the lower half-plane; they relate to the
    /// drift-matrix eigenvalues by `λ = −iω`.
    pub fn response_poles(&self) -> Result<Vec<Complex64>> {
        poly::roots(&self.characteristic_polynomial())
    }

    fn chi_denominator(&self, omega: f64) -> Complex64 {
        let c = &self.coefficients;
        Complex64::new(c.omega_m * c.omega_m_tilde - omega * omega, -c.gamma_m * omega)
            - self.coupling() / self.cavity_factor(omega)
    }

    /// Effective mechanical susceptibility χ_eff(ω).
    pub fn chi_eff(&self, omega: f64) -> Result<Complex64> {
        let den = self.chi_denominator(omega);
        if den.norm() == 0.0 || !den.is_finite() {
            return Err(Error::Pole { omega });
        }
        Ok(self.coefficients.omega_m / den)
    }

    pub fn thermal_noise_at(&self, omega: f64) -> f64 {
        let c = &self.coefficients;
        match self.thermal_noise {
            ThermalNoise::FlatMarkovian => c.gamma_m * (2.0 * self.n_th + 1.0),
            ThermalNoise::ExactCoth => {
                let beta = HBAR / (2.0 * K_B * self.temperature);
                let x = (beta * omega).abs();
                let classical = 2.0 * c.gamma_m * K_B * self.temperature / (HBAR * c.omega_m);
                if x < 1e-6 {
                    // ω coth(βω) = (1/β)(1 + (βω)²/3 + …)
                    classical * (1.0 + x * x / 3.0)
                } else {
                    omega.abs() * c.gamma_m / c.omega_m / x.tanh()
                }
            }
        }
    }

    pub fn radiation_pressure_noise(&self, omega: f64) -> f64 {
        let c = &self.coefficients;
        2.0 * c.g_tilde * c.g_tilde * self.intensity * c.kappa
            * (c.kappa * c.kappa + omega * omega + c.delta_tilde * c.delta_tilde)
            / self.sideband_product(omega)
    }

    /// `(S_th, S_rp)` at ω.
    pub fn noise_spectra(&self, omega: f64) -> (f64, f64) {
        (self.thermal_noise_at(omega), self.radiation_pressure_noise(omega))
    }

    pub fn effective_dynamics(&self, omega: f64) -> EffectiveDynamics {
        let c = &self.coefficients;
        let den = self.sideband_product(omega);
        let spring = self.coupling()
            * (c.kappa * c.kappa - omega * omega + c.delta_tilde * c.delta_tilde)
            / den;
        EffectiveDynamics {
            omega_eff_sq: c.omega_m * c.omega_m_tilde - spring,
            gamma_eff: c.gamma_m + 2.0 * c.kappa * self.coupling() / den,
        }
    }

    /// Ω_eff and Γ_eff at `√(ω_m ω̃_m)`.
    pub fn quasiresonant_dynamics(&self) -> EffectiveDynamics {
        self.effective_dynamics(self.quasiresonance_frequency())
    }

    /// `|χ_eff|² (S_th + S_rp)` without the pole check, for integration.
    pub(crate) fn s_xx_unchecked(&self, omega: f64) -> f64 {
        let c = &self.coefficients;
        let chi2 = c.omega_m * c.omega_m / self.chi_denominator(omega).norm_sqr();
        chi2 * (self.thermal_noise_at(omega) + self.radiation_pressure_noise(omega))
    }

    pub fn spectrum_xx(&self, omega: f64) -> Result<f64> {
        let chi = self.chi_eff(omega)?;
        let (th, rp) = self.noise_spectra(omega);
        Ok(chi.norm_sqr() * (th + rp))
    }

    pub fn spectrum_pp(&self, omega: f64) -> Result<f64> {
        let w = omega / self.coefficients.omega_m;
        Ok(w * w * self.spectrum_xx(omega)?)
    }

    pub fn point(&self, omega: f64) -> Result<SpectrumPoint> {
        let chi_eff = self.chi_eff(omega)?;
        let (s_th, s_rp) = self.noise_spectra(omega);
        let s_xx = chi_eff.norm_sqr() * (s_th + s_rp);
        let w = omega / self.coefficients.omega_m;
        let dynamics = self.effective_dynamics(omega);
        Ok(SpectrumPoint {
            omega,
            chi_eff,
            s_th,
            s_rp,
            s_xx,
            s_pp: w * w * s_xx,
            omega_eff: dynamics.omega_eff().unwrap_or(f64::NAN),
            gamma_eff: dynamics.gamma_eff,
        })
    }
}
