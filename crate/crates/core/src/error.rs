use thiserror::Error;

/// Errors raised by the physics pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration for `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("inverted spring: effective mechanical frequency {omega_m_tilde:e} rad/s is not positive")]
    InvertedSpring { omega_m_tilde: f64 },

    #[error("no stable spring: every steady-state root has a non-positive effective frequency (rejected intensities: {rejected:?})")]
    NoPhysicalBranch { rejected: Vec<f64> },

    #[error("eigenvalue solver did not converge on the drift matrix")]
    EigenNonConvergence,

    #[error("polynomial root finder did not converge after {iterations} iterations")]
    RootNonConvergence { iterations: usize },

    #[error("susceptibility has a pole on the real axis at omega = {omega:e} rad/s")]
    Pole { omega: f64 },

    #[error("operating point is unstable; quadrature variances are undefined")]
    Unstable,

    #[error("quadrature did not converge: worst subinterval [{lo:e}, {hi:e}] with error estimate {error:e}")]
    Quadrature { lo: f64, hi: f64, error: f64 },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
