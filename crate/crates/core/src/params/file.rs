//! Flat `key = value` configuration documents.
//!
//! ```text
//! # comments start with '#'
//! preset = paper2017          # optional, applied before any other key
//! pump_wavelength = 810e-9    # m
//! mechanical_frequency = 10e6 # Hz (ω_m/2π)
//! mechanical_damping = 100    # Hz (γ_m/2π)
//! cavity_linewidth = 1e6      # Hz (κ/2π)
//! linear_coupling = 215       # Hz (g_l/2π)
//! quadratic_ratio = 0.01      # g_q/g_l
//! detuning = omega_m          # or a value in rad/s
//! input_power = 100e-6        # W
//! bath_temperature = 1e-3     # K
//! oscillator_mass = 5e-12     # kg
//! detuning_convention = as-printed   # as-printed | unified-xs2 | unified-x2s
//! thermal_mode = flat                # flat | exact-coth
//! frequency_cutoff = 6.283e10        # rad/s, exact-coth integrals only
//! ```

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{Detuning, SystemConfig, NUMERIC_FIELDS};
use crate::spectra::ThermalNoise;

/// Parse failure with the offending line (1-based) and key.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ConfigFileError {
    pub line: usize,
    pub key: Option<String>,
    pub message: String,
}

/// Model options that are not physical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    pub thermal_noise: ThermalNoise,
    /// Upper integration limit for exact-coth integrals (rad/s). `None`
    /// means `1e3 · ω_m`.
    pub frequency_cutoff: Option<f64>,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            thermal_noise: ThermalNoise::FlatMarkovian,
            frequency_cutoff: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigDocument {
    pub system: SystemConfig,
    pub options: ModelOptions,
}

const OPTION_KEYS: [&str; 4] = ["preset", "detuning_convention", "thermal_mode", "frequency_cutoff"];

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self, ConfigFileError> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        let mut preset = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigFileError {
                    line,
                    key: None,
                    message: format!("expected `key = value`, found `{content}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let err = |message: String| ConfigFileError {
                line,
                key: Some(key.to_string()),
                message,
            };
            if !NUMERIC_FIELDS.contains(&key) && !OPTION_KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            if value.is_empty() {
                return Err(err(format!("missing value for `{key}`")));
            }
            if key == "preset" {
                preset = Some((line, value.to_string()));
            } else {
                entries.push((line, key.to_string(), value.to_string()));
            }
        }

        let mut doc = ConfigDocument::default();
        if let Some((line, name)) = preset {
            doc.system = SystemConfig::preset(&name).ok_or_else(|| ConfigFileError {
                line,
                key: Some("preset".into()),
                message: format!("unknown preset `{name}`"),
            })?;
        }
        for (line, key, value) in entries {
            doc.apply(&key, &value).map_err(|message| ConfigFileError {
                line,
                key: Some(key.clone()),
                message,
            })?;
        }
        Ok(doc)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "detuning_convention" => {
                self.system.detuning_convention = value.parse()?;
            }
            "thermal_mode" => {
                self.options.thermal_noise = value.parse()?;
            }
            "frequency_cutoff" => {
                let v = parse_number(key, value)?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(format!("`frequency_cutoff` must be > 0, got {v}"));
                }
                self.options.frequency_cutoff = Some(v);
            }
            "detuning" if value.eq_ignore_ascii_case("omega_m") => {
                self.system.detuning = Detuning::MechanicalResonance;
            }
            _ => {
                let v = parse_number(key, value)?;
                self.system.set_field(key, v).map_err(|e| e.to_string())?;
            }
        }
        Ok(())
    }

    /// Renders the document back into the file format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let s = &self.system;
        for name in NUMERIC_FIELDS {
            let unit = SystemConfig::field_unit(name).unwrap_or("");
            let value = match (name, s.detuning) {
                ("detuning", Detuning::MechanicalResonance) => "omega_m".to_string(),
                _ => format!("{}", s.field(name).unwrap_or(f64::NAN)),
            };
            if unit.is_empty() {
                let _ = writeln!(out, "{name} = {value}");
            } else {
                let _ = writeln!(out, "{name} = {value}  # {unit}");
            }
        }
        let _ = writeln!(out, "detuning_convention = {}", s.detuning_convention);
        let _ = writeln!(out, "thermal_mode = {}", self.options.thermal_noise);
        if let Some(c) = self.options.frequency_cutoff {
            let _ = writeln!(out, "frequency_cutoff = {c}  # rad_s");
        }
        out
    }
}

impl fmt::Display for ConfigDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64, String> {
    value
        .parse::<f64>()
        .map_err(|_| format!("`{key}` expects a number, found `{value}`"))
}
