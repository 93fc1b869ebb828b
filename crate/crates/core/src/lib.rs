//! Mechanical squeezing in a driven cavity with linear and quadratic
//! dispersive optomechanical coupling.
//!
//! The pipeline is `SystemConfig` → [`derive_params`] → [`solve_steady_state`]
//! → [`routh_hurwitz`] → [`SpectralModel`] → [`variance_quadrature`].
//!
//! ```
//! use optosqueeze_core::*;
//!
//! let params = derive_params(&SystemConfig::paper2017()).unwrap();
//! let branch = solve_steady_state(&params).unwrap()[0];
//! assert!(routh_hurwitz(&params, &branch).unwrap().is_stable());
//! let model = SpectralModel::new(&params, &branch, ThermalNoise::FlatMarkovian);
//! let v = variance_quadrature(&model).unwrap();
//! assert!(v.var_x > 0.0 && v.var_p > 0.0);
//! ```

pub mod error;
pub mod params;
pub mod poly;
pub mod quadrature;
pub mod spectra;
pub mod stability;
pub mod steady_state;
pub mod variance;

pub use error::{Error, Result};
pub use params::file::{ConfigDocument, ConfigFileError, ModelOptions};
pub use params::{derive_params, Detuning, SystemConfig, SystemParams};
pub use spectra::{EffectiveDynamics, SpectralModel, SpectrumPoint, ThermalNoise, TransferCoefficients};
pub use stability::{
    drift_matrix, eigen_stable, routh_hurwitz, stability_from_coefficients, DriftMatrix,
    FluctuationCoefficients, StabilityReport,
};
pub use steady_state::{
    bilinear_steady_state, normalized_spring, solve_steady_state, solve_steady_state_detailed,
    Bilinears, DetuningConvention, RejectedRoot, SteadySolution, SteadyState,
};
pub use variance::{
    squeezing_metrics, variance_closed_form, variance_quadrature, BeatsThreeDb, ClosedForm, Method,
    VarianceResult, SQL,
};
