//! Experimental parameters and the derived angular-frequency parameter set.
//!
//! [`SystemConfig`] holds values the way they are usually quoted in the lab:
//! frequencies divided by 2π (Hz), power in W, temperature in K. Everything
//! downstream works with [`SystemParams`], which is in rad/s.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::steady_state::DetuningConvention;

pub mod file;

/// Reduced Planck constant (J s), CODATA 2018 exact.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K), CODATA 2018 exact.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Upper bound on the thermal photon number of the cavity mode.
pub const MAX_THERMAL_PHOTONS: f64 = 1e-10;

/// Cavity detuning `Δ = ω_c − ω_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detuning {
    /// `Δ = ω_m`, the red mechanical sideband.
    MechanicalResonance,
    /// Explicit detuning in rad/s.
    Angular(f64),
}

/// User-facing parameters. Frequencies are ordinary (Hz), i.e. already
/// divided by 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Pump wavelength λ (m).
    pub pump_wavelength: f64,
    /// ω_m/2π (Hz).
    pub mechanical_frequency: f64,
    /// γ_m/2π (Hz).
    pub mechanical_damping: f64,
    /// κ/2π (Hz).
    pub cavity_linewidth: f64,
    /// g_l/2π (Hz).
    pub linear_coupling: f64,
    /// g_q/g_l, dimensionless and of either sign.
    pub quadratic_ratio: f64,
    pub detuning: Detuning,
    /// Input power 𝒫 (W).
    pub input_power: f64,
    /// Bath temperature T (K).
    pub bath_temperature: f64,
    /// Effective mass m (kg).
    pub oscillator_mass: f64,
    pub detuning_convention: DetuningConvention,
}

/// Names of the numeric [`SystemConfig`] fields, in declaration order.
pub const NUMERIC_FIELDS: [&str; 10] = [
    "pump_wavelength",
    "mechanical_frequency",
    "mechanical_damping",
    "cavity_linewidth",
    "linear_coupling",
    "quadratic_ratio",
    "detuning",
    "input_power",
    "bath_temperature",
    "oscillator_mass",
];

impl SystemConfig {
    pub const PAPER2017: &'static str = "paper2017";

    /// Reference parameter set: 810 nm pump, ω_m/2π = 10 MHz,
    /// γ_m/2π = 100 Hz, κ/2π = 1 MHz, g_l/2π = 215 Hz, m = 5 ng, T = 1 mK,
    /// Δ = ω_m. Power defaults to 100 µW and the quadratic coupling to zero.
    pub fn paper2017() -> Self {
        SystemConfig {
            pump_wavelength: 810e-9,
            mechanical_frequency: 10e6,
            mechanical_damping: 100.0,
            cavity_linewidth: 1e6,
            linear_coupling: 215.0,
            quadratic_ratio: 0.0,
            detuning: Detuning::MechanicalResonance,
            input_power: 100e-6,
            bath_temperature: 1e-3,
            oscillator_mass: 5e-12,
            detuning_convention: DetuningConvention::AsPrinted,
        }
    }

    /// Looks up a named preset.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            Self::PAPER2017 => Some(Self::paper2017()),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &[Self::PAPER2017]
    }

    pub fn with_power(mut self, watts: f64) -> Self {
        self.input_power = watts;
        self
    }

    pub fn with_quadratic_ratio(mut self, ratio: f64) -> Self {
        self.quadratic_ratio = ratio;
        self
    }

    /// Reads a numeric field by name. `detuning` resolves the symbolic
    /// `Δ = ω_m` choice to rad/s.
    pub fn field(&self, name: &str) -> Option<f64> {
        Some(match name {
            "pump_wavelength" => self.pump_wavelength,
            "mechanical_frequency" => self.mechanical_frequency,
            "mechanical_damping" => self.mechanical_damping,
            "cavity_linewidth" => self.cavity_linewidth,
            "linear_coupling" => self.linear_coupling,
            "quadratic_ratio" => self.quadratic_ratio,
            "detuning" => match self.detuning {
                Detuning::MechanicalResonance => 2.0 * PI * self.mechanical_frequency,
                Detuning::Angular(d) => d,
            },
            "input_power" => self.input_power,
            "bath_temperature" => self.bath_temperature,
            "oscillator_mass" => self.oscillator_mass,
            _ => return None,
        })
    }

    /// Sets a numeric field by name.
    pub fn set_field(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "pump_wavelength" => self.pump_wavelength = value,
            "mechanical_frequency" => self.mechanical_frequency = value,
            "mechanical_damping" => self.mechanical_damping = value,
            "cavity_linewidth" => self.cavity_linewidth = value,
            "linear_coupling" => self.linear_coupling = value,
            "quadratic_ratio" => self.quadratic_ratio = value,
            "detuning" => self.detuning = Detuning::Angular(value),
            "input_power" => self.input_power = value,
            "bath_temperature" => self.bath_temperature = value,
            "oscillator_mass" => self.oscillator_mass = value,
            _ => return Err(Error::config(name, "unknown parameter")),
        }
        Ok(())
    }

    /// Unit suffix used for the field in file and CSV headers.
    pub fn field_unit(name: &str) -> Option<&'static str> {
        Some(match name {
            "pump_wavelength" => "m",
            "mechanical_frequency" | "mechanical_damping" | "cavity_linewidth"
            | "linear_coupling" => "hz",
            "quadratic_ratio" => "",
            "detuning" => "rad_s",
            "input_power" => "w",
            "bath_temperature" => "k",
            "oscillator_mass" => "kg",
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pump_wavelength", self.pump_wavelength),
            ("mechanical_frequency", self.mechanical_frequency),
            ("mechanical_damping", self.mechanical_damping),
            ("cavity_linewidth", self.cavity_linewidth),
            ("linear_coupling", self.linear_coupling),
            ("bath_temperature", self.bath_temperature),
            ("oscillator_mass", self.oscillator_mass),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::config(name, format!("must be finite and > 0, got {value}")));
            }
        }
        if let Detuning::Angular(d) = self.detuning {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::config("detuning", format!("must be finite and > 0, got {d}")));
            }
        }
        if !(self.input_power.is_finite() && self.input_power >= 0.0) {
            return Err(Error::config(
                "input_power",
                format!("must be finite and >= 0, got {}", self.input_power),
            ));
        }
        if !self.quadratic_ratio.is_finite() {
            return Err(Error::config("quadratic_ratio", "must be finite"));
        }
        Ok(())
    }
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::paper2017()
    }
}

/// Internal parameter set, all rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega_m: f64,
    pub gamma_m: f64,
    pub kappa: f64,
    pub g_l: f64,
    pub g_q: f64,
    /// Cavity detuning Δ.
    pub delta: f64,
    /// Pump angular frequency ω_p = 2πc/λ.
    pub omega_p: f64,
    /// Cavity resonance ω_c = ω_p + Δ.
    pub omega_c: f64,
    /// Drive amplitude ε = √(2κ𝒫/ħω_p) (s⁻¹).
    pub epsilon: f64,
    /// Mean thermal phonon number.
    pub n_th: f64,
    /// Mean thermal photon number at ω_c.
    pub n_a: f64,
    pub mass: f64,
    pub temperature: f64,
    pub detuning_convention: DetuningConvention,
}

/// Bose–Einstein occupation of a mode at `omega` (rad/s) and `temperature` (K).
pub fn bose_einstein(omega: f64, temperature: f64) -> f64 {
    1.0 / (HBAR * omega / (K_B * temperature)).exp_m1()
}

/// Converts a [`SystemConfig`] into angular-frequency parameters.
pub fn derive_params(config: &SystemConfig) -> Result<SystemParams> {
    config.validate()?;
    if config.quadratic_ratio.abs() > 1.0 {
        log::warn!(
            "|g_q/g_l| = {} exceeds 1; the model assumes a residual quadratic coupling",
            config.quadratic_ratio.abs()
        );
    }
    let two_pi = 2.0 * PI;
    let omega_m = two_pi * config.mechanical_frequency;
    let gamma_m = two_pi * config.mechanical_damping;
    let kappa = two_pi * config.cavity_linewidth;
    let g_l = two_pi * config.linear_coupling;
    let g_q = config.quadratic_ratio * g_l;
    let delta = match config.detuning {
        Detuning::MechanicalResonance => omega_m,
        Detuning::Angular(d) => d,
    };
    let omega_p = two_pi * SPEED_OF_LIGHT / config.pump_wavelength;
    let omega_c = omega_p + delta;
    let epsilon = (2.0 * kappa * config.input_power / (HBAR * omega_p)).sqrt();
    let n_th = bose_einstein(omega_m, config.bath_temperature);
    let n_a = bose_einstein(omega_c, config.bath_temperature);
    if n_a.is_nan() || n_a >= MAX_THERMAL_PHOTONS {
        return Err(Error::config(
            "bath_temperature",
            format!("thermal photon number {n_a:e} is not negligible at the cavity frequency"),
        ));
    }
    Ok(SystemParams {
        omega_m,
        gamma_m,
        kappa,
        g_l,
        g_q,
        delta,
        omega_p,
        omega_c,
        epsilon,
        n_th,
        n_a,
        mass: config.oscillator_mass,
        temperature: config.bath_temperature,
        detuning_convention: config.detuning_convention,
    })
}

impl SystemParams {
    /// Copy with the drive switched off, used for zero-power anchors.
    pub fn undriven(&self) -> Self {
        SystemParams { epsilon: 0.0, ..*self }
    }
}
