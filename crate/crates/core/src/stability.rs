//! Linearised fluctuation dynamics `u̇ = M u + ν` over `(δx, δp, δX, δP)`
//! and their stability.
//!
//! The Routh–Hurwitz quantities are the coefficients of the characteristic
//! polynomial `λ⁴ + (2κ+γ_m)λ³ + s₁λ² + s₂λ + s₃` of `M`; the verdict is
//! cross-checked against the eigenvalues of `M` itself.

use nalgebra::{Matrix4, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::steady_state::SteadyState;

/// Relative distance to a stability boundary below which a point is
/// reported as marginal.
pub const MARGINAL_RTOL: f64 = 1e-9;

/// The rates that enter the drift matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationCoefficients {
    pub omega_m: f64,
    pub omega_m_tilde: f64,
    pub gamma_m: f64,
    pub kappa: f64,
    pub delta_tilde: f64,
    pub g_tilde: f64,
    pub field_x: f64,
    pub field_p: f64,
}

impl FluctuationCoefficients {
    pub fn new(params: &SystemParams, ss: &SteadyState) -> Self {
        FluctuationCoefficients {
            omega_m: params.omega_m,
            omega_m_tilde: ss.omega_m_tilde,
            gamma_m: params.gamma_m,
            kappa: params.kappa,
            delta_tilde: ss.delta_tilde,
            g_tilde: ss.g_tilde,
            field_x: ss.field_x,
            field_p: ss.field_p,
        }
    }

    /// `(X_s² + P_s²)/2 = |a_s|²`.
    pub fn intensity(&self) -> f64 {
        0.5 * (self.field_x * self.field_x + self.field_p * self.field_p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    pub entries: Matrix4<f64>,
}

impl DriftMatrix {
    pub fn from_coefficients(c: &FluctuationCoefficients) -> Self {
        let gx = c.g_tilde * c.field_x;
        let gp = c.g_tilde * c.field_p;
        #[rustfmt::skip]
        let entries = Matrix4::new(
            0.0,              c.omega_m,  0.0,            0.0,
            -c.omega_m_tilde, -c.gamma_m, -gx,            -gp,
            gp,               0.0,        -c.kappa,       c.delta_tilde,
            -gx,              0.0,        -c.delta_tilde, -c.kappa,
        );
        DriftMatrix { entries }
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }
}

pub fn drift_matrix(params: &SystemParams, ss: &SteadyState) -> DriftMatrix {
    DriftMatrix::from_coefficients(&FluctuationCoefficients::new(params, ss))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    /// `(2κ + γ_m) s₁ > s₂`.
    pub cond4: bool,
    /// `s₁ s₂ (2κ + γ_m) > s₂² + (2κ + γ_m)² s₃`.
    pub cond5: bool,
    pub rh_stable: bool,
    pub eigen_stable: bool,
    /// Eigenvalues of the drift matrix sorted by real part (rad/s).
    pub eigenvalues: [Complex64; 4],
    /// Some inequality, or the leading eigenvalue, lies within
    /// [`MARGINAL_RTOL`] of its boundary.
    pub marginal: bool,
}

impl StabilityReport {
    /// Both criteria agree that the point is stable.
    pub fn is_stable(&self) -> bool {
        self.rh_stable && self.eigen_stable
    }
}

fn near_boundary(value: f64, scale: f64) -> bool {
    value.abs() <= MARGINAL_RTOL * scale
}

/// Routh–Hurwitz test plus independent eigenvalue check.
pub fn routh_hurwitz(params: &SystemParams, ss: &SteadyState) -> Result<StabilityReport> {
    stability_from_coefficients(&FluctuationCoefficients::new(params, ss))
}

pub fn stability_from_coefficients(c: &FluctuationCoefficients) -> Result<StabilityReport> {
    let k2d2 = c.kappa * c.kappa + c.delta_tilde * c.delta_tilde;
    let spring = c.omega_m_tilde * c.omega_m;
    let a1 = 2.0 * c.kappa + c.gamma_m;
    let coupling = c.delta_tilde * c.omega_m * c.g_tilde * c.g_tilde
        * (c.field_x * c.field_x + c.field_p * c.field_p);

    let s1 = k2d2 + 2.0 * c.kappa * c.gamma_m + spring;
    let s2 = k2d2 * c.gamma_m + 2.0 * c.kappa * spring;
    let s3 = k2d2 * spring - coupling;
    let c4 = a1 * s1 - s2;
    let c5 = s1 * s2 * a1 - (s2 * s2 + a1 * a1 * s3);

    let cond4 = c4 > 0.0;
    let cond5 = c5 > 0.0;
    let rh_stable = s1 > 0.0 && s2 > 0.0 && s3 > 0.0 && cond4 && cond5;

    let mut marginal = near_boundary(s1, k2d2 + (2.0 * c.kappa * c.gamma_m).abs() + spring.abs())
        || near_boundary(s2, (k2d2 * c.gamma_m).abs() + (2.0 * c.kappa * spring).abs())
        || near_boundary(s3, (k2d2 * spring).abs() + coupling.abs())
        || near_boundary(c4, (a1 * s1).abs() + s2.abs())
        || near_boundary(c5, (s1 * s2 * a1).abs() + s2 * s2 + (a1 * a1 * s3).abs());

    let (eigen_stable, eigenvalues) = eigen_stable(&DriftMatrix::from_coefficients(c))?;
    let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    marginal |= near_boundary(eigenvalues[3].re, radius);

    Ok(StabilityReport {
        s1,
        s2,
        s3,
        cond4,
        cond5,
        rh_stable,
        eigen_stable,
        eigenvalues,
        marginal,
    })
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable (Parlett–Reinsch).
pub fn balance(m: &Matrix4<f64>) -> Matrix4<f64> {
    let mut a = *m;
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..4 {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..4 {
                if j != i {
                    col += a[(j, i)].abs();
                    row += a[(i, j)].abs();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut g = row / radix;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * total {
                converged = false;
                for j in 0..4 {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
    a
}

fn schur_eigenvalues(m: Matrix4<f64>, max_iter: usize) -> Option<[Complex64; 4]> {
    let schur = Schur::try_new(m, f64::EPSILON, max_iter)?;
    let ev = schur.complex_eigenvalues();
    Some([ev[0], ev[1], ev[2], ev[3]])
}

/// Eigenvalues of the drift matrix sorted by real part, and whether all
/// of them lie in the open left half-plane.
pub fn eigen_stable(matrix: &DriftMatrix) -> Result<(bool, [Complex64; 4])> {
    let mut ev = schur_eigenvalues(balance(&matrix.entries), 500)
        .or_else(|| schur_eigenvalues(matrix.entries, 5000))
        .ok_or(Error::EigenNonConvergence)?;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok((ev.iter().all(|z| z.re < 0.0), ev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_params, SystemConfig};
    use crate::steady_state::solve_steady_state;
    use approx::assert_relative_eq;

    fn preset(power: f64, ratio: f64) -> (SystemParams, Vec<SteadyState>) {
        let p = derive_params(&SystemConfig::paper2017().with_power(power).with_quadratic_ratio(ratio))
            .unwrap();
        let b = solve_steady_state(&p).unwrap();
        (p, b)
    }

    fn close(a: Complex64, b: Complex64, rtol: f64) -> bool {
        (a - b).norm() <= rtol * b.norm().max(1.0)
    }

    #[test]
    fn matrix_layout() {
        let (p, b) = preset(100e-6, 0.01);
        let m = drift_matrix(&p, &b[0]).entries;
        assert_eq!(m.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, p.omega_m, 0.0, 0.0]);
        assert_eq!(m[(2, 2)], -p.kappa);
        assert_eq!(m[(3, 3)], -p.kappa);
        assert_eq!(m[(2, 3)], b[0].delta_tilde);
        assert_eq!(m[(3, 2)], -b[0].delta_tilde);
        assert_eq!(m[(1, 0)], -b[0].omega_m_tilde);
    }

    #[test]
    fn undriven_block_structure() {
        let (p, b) = preset(0.0, 0.01);
        let r = routh_hurwitz(&p, &b[0]).unwrap();
        assert!(r.rh_stable && r.eigen_stable);
        // mechanical pair: λ² + γλ + ω_m ω̃_m = 0; optical: −κ ± iΔ̃
        let disc = Complex64::new(p.gamma_m.powi(2) - 4.0 * p.omega_m * p.omega_m, 0.0).sqrt();
        let mech = [(-p.gamma_m + disc) / 2.0, (-p.gamma_m - disc) / 2.0];
        let opt = [
            Complex64::new(-p.kappa, p.delta),
            Complex64::new(-p.kappa, -p.delta),
        ];
        for target in mech.iter().chain(opt.iter()) {
            assert!(
                r.eigenvalues.iter().any(|z| close(*z, *target, 1e-12)),
                "{target} not in {:?}",
                r.eigenvalues
            );
        }
    }

    #[test]
    fn linear_only_reduction() {
        let (p, b) = preset(1e-3, 0.0);
        let s = b[0];
        assert_eq!(s.omega_m_tilde, p.omega_m);
        assert_eq!(s.g_tilde, p.g_l);
        let m = drift_matrix(&p, &s).entries;
        assert_eq!(m[(1, 0)], -p.omega_m);
        assert_eq!(m[(1, 2)], -p.g_l * s.field_x);
    }

    #[test]
    fn determinant_equals_s3() {
        let (p, b) = preset(100e-6, 0.01);
        let s = b[0];
        let m = drift_matrix(&p, &s);
        let r = routh_hurwitz(&p, &s).unwrap();
        // det(−M) = det(M) for a 4×4 matrix
        let expanded = (p.kappa.powi(2) + s.delta_tilde.powi(2)) * p.omega_m * s.omega_m_tilde
            - s.delta_tilde * p.omega_m * s.g_tilde.powi(2) * (s.field_x.powi(2) + s.field_p.powi(2));
        assert_relative_eq!(m.determinant(), expanded, max_relative = 1e-9);
        assert_relative_eq!(r.s3, expanded, max_relative = 1e-15);
        let prod: Complex64 = r.eigenvalues.iter().product();
        assert_relative_eq!(prod.re, r.s3, max_relative = 1e-8);
    }

    #[test]
    fn trace_identity() {
        for (power, ratio) in [(1e-5, 0.0), (1e-4, -0.01), (2e-3, 0.01)] {
            let (p, b) = preset(power, ratio);
            for s in &b {
                let m = drift_matrix(&p, s);
                assert_eq!(m.trace(), -(p.gamma_m + 2.0 * p.kappa));
                let r = routh_hurwitz(&p, s).unwrap();
                let sum: Complex64 = r.eigenvalues.iter().sum();
                assert_relative_eq!(sum.re, m.trace(), max_relative = 1e-10);
                assert!(sum.im.abs() <= 1e-10 * m.trace().abs());
            }
        }
    }

    #[test]
    fn simple_matrices() {
        let d = DriftMatrix {
            entries: Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, -2.0, -3.0, -4.0)),
        };
        let (stable, ev) = eigen_stable(&d).unwrap();
        assert!(stable);
        assert_eq!(ev.map(|z| z.re), [-4.0, -3.0, -2.0, -1.0]);

        let gamma = 628.0;
        let d = DriftMatrix {
            entries: Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, gamma, -3.0, -4.0)),
        };
        let (stable, ev) = eigen_stable(&d).unwrap();
        assert!(!stable);
        assert_relative_eq!(ev[3].re, gamma, max_relative = 1e-14);
    }

    #[test]
    fn negative_coupling_goes_unstable_at_high_power() {
        let (p, b) = preset(300e-6, -0.01);
        let r = routh_hurwitz(&p, &b[0]).unwrap();
        assert!(!r.rh_stable);
        assert!(!r.eigen_stable);
        for s in &b {
            let r = routh_hurwitz(&p, s).unwrap();
            assert_eq!(r.rh_stable, r.eigen_stable);
        }
        let (p, b) = preset(100e-6, -0.01);
        let r = routh_hurwitz(&p, &b[0]).unwrap();
        assert!(r.rh_stable && r.eigen_stable && !r.marginal);
    }

    #[test]
    fn balancing_preserves_spectrum() {
        let (p, b) = preset(1e-3, 0.01);
        let m = drift_matrix(&p, &b[0]).entries;
        let bal = balance(&m);
        let a = schur_eigenvalues(m, 5000).unwrap();
        let c = schur_eigenvalues(bal, 5000).unwrap();
        for z in a {
            assert!(c.iter().any(|w| close(*w, z, 1e-9)));
        }
        assert_relative_eq!(bal.trace(), m.trace(), max_relative = 1e-15);
    }
}
