//! Operating points shared by the benchmarks.

use optosqueeze_core::{
    derive_params, solve_steady_state, SpectralModel, SteadyState, SystemConfig, SystemParams,
    ThermalNoise,
};

/// `(label, power in W, g_q/g_l)` spanning the monostable and tristable regimes.
pub const CASES: [(&str, f64, f64); 3] = [
    ("loc_100uW", 100e-6, 0.0),
    ("positive_1mW", 1e-3, 0.01),
    ("negative_100uW", 100e-6, -0.01),
];

pub fn params(power: f64, ratio: f64) -> SystemParams {
    derive_params(&SystemConfig::paper2017().with_power(power).with_quadratic_ratio(ratio))
        .expect("preset parameters")
}

pub fn lowest_branch(params: &SystemParams) -> SteadyState {
    solve_steady_state(params).expect("steady state")[0]
}

pub fn model(power: f64, ratio: f64) -> SpectralModel {
    let p = params(power, ratio);
    SpectralModel::new(&p, &lowest_branch(&p), ThermalNoise::FlatMarkovian)
}
