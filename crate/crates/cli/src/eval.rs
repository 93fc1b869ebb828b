//! One operating point: every branch, its stability, quasiresonant
//! dynamics and variances.

use std::fmt;
use std::str::FromStr;

use optosqueeze_core::{
    derive_params, routh_hurwitz, solve_steady_state, variance_closed_form, variance_quadrature,
    ClosedForm, EffectiveDynamics, Error, ModelOptions, SpectralModel, StabilityReport, SteadyState,
    SystemConfig, SystemParams, ThermalNoise, VarianceResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceMethod {
    Quadrature,
    ClosedForm,
    #[default]
    Both,
}

impl VarianceMethod {
    pub fn quadrature(self) -> bool {
        matches!(self, VarianceMethod::Quadrature | VarianceMethod::Both)
    }

    pub fn closed_form(self) -> bool {
        matches!(self, VarianceMethod::ClosedForm | VarianceMethod::Both)
    }
}

impl fmt::Display for VarianceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarianceMethod::Quadrature => "quadrature",
            VarianceMethod::ClosedForm => "closed-form",
            VarianceMethod::Both => "both",
        })
    }
}

impl FromStr for VarianceMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadrature" => Ok(VarianceMethod::Quadrature),
            "closed-form" => Ok(VarianceMethod::ClosedForm),
            "both" => Ok(VarianceMethod::Both),
            _ => Err(format!("unknown method `{s}` (expected quadrature, closed-form or both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalOptions {
    pub model: ModelOptions,
    pub method: VarianceMethod,
    /// Skip variances entirely (maps that only need steady-state data).
    pub skip_variances: bool,
}

impl EvalOptions {
    pub fn thermal_noise(&self) -> ThermalNoise {
        self.model.thermal_noise
    }
}

#[derive(Debug, Clone)]
pub struct BranchEval {
    pub steady: SteadyState,
    pub normalized_spring: f64,
    pub stability: Result<StabilityReport, Error>,
    pub dynamics: EffectiveDynamics,
    pub gamma_eff_ratio: f64,
    /// `None` when not requested or the point is unstable.
    pub quadrature: Option<Result<VarianceResult, Error>>,
    pub closed_form: Option<ClosedForm>,
}

impl BranchEval {
    pub fn is_stable(&self) -> bool {
        matches!(&self.stability, Ok(r) if r.is_stable())
    }

    /// First numeric failure on this branch, if any.
    pub fn failure(&self) -> Option<&Error> {
        match (&self.stability, &self.quadrature) {
            (Err(e), _) => Some(e),
            (_, Some(Err(e))) => Some(e),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PointEval {
    pub params: SystemParams,
    pub branches: Vec<BranchEval>,
}

impl PointEval {
    /// Lowest-intensity stable branch.
    pub fn selected(&self) -> Option<&BranchEval> {
        self.branches.iter().find(|b| b.is_stable())
    }
}

pub fn spectral_model(params: &SystemParams, ss: &SteadyState, options: &EvalOptions) -> SpectralModel {
    let model = SpectralModel::new(params, ss, options.thermal_noise());
    match options.model.frequency_cutoff {
        Some(cutoff) => model.with_cutoff(cutoff),
        None => model,
    }
}

pub fn evaluate_branch(params: &SystemParams, ss: &SteadyState, options: &EvalOptions) -> BranchEval {
    let model = spectral_model(params, ss, options);
    let stability = routh_hurwitz(params, ss);
    let stable = matches!(&stability, Ok(r) if r.is_stable());
    let dynamics = model.quasiresonant_dynamics();
    let variances = stable && !options.skip_variances;
    BranchEval {
        steady: *ss,
        normalized_spring: ss.normalized_spring(params),
        stability,
        dynamics,
        gamma_eff_ratio: dynamics.gamma_eff / params.gamma_m,
        quadrature: (variances && options.method.quadrature()).then(|| variance_quadrature(&model)),
        closed_form: (variances && options.method.closed_form()).then(|| variance_closed_form(&model)),
    }
}

pub fn evaluate(config: &SystemConfig, options: &EvalOptions) -> Result<PointEval, Error> {
    let params = derive_params(config)?;
    let branches = solve_steady_state(&params)?
        .iter()
        .map(|ss| evaluate_branch(&params, ss, options))
        .collect();
    Ok(PointEval { params, branches })
}
