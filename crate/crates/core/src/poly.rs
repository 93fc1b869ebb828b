//! Roots of small complex polynomials (Aberth–Ehrlich iteration).

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;
const STEP_TOL: f64 = 1e-13;

/// Evaluates `Σ c_k z^k` and its derivative. Coefficients are in ascending
/// powers.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Multiplies two polynomials given in ascending powers.
pub fn multiply(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// All complex roots of `Σ c_k z^k` (ascending powers).
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = match coeffs.iter().rposition(|c| c.norm() != 0.0) {
        Some(d) => d,
        None => return Ok(Vec::new()),
    };
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs[..=degree].iter().map(|c| c / lead).collect();

    // rescale z = s·y so the root magnitudes are O(1)
    let scale = (0..degree)
        .map(|k| monic[k].norm().powf(1.0 / (degree - k) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let scaled: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .map(|(k, c)| c * scale.powi(k as i32 - degree as i32))
        .collect();

    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / degree as f64 + 0.4;
            Complex64::from_polar(0.9, angle)
        })
        .collect();

    // a root is frozen once its relative Aberth step drops below STEP_TOL
    let mut done = vec![false; degree];
    for _ in 0..MAX_ITER {
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(&scaled, z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                done[i] = step.norm() <= STEP_TOL * z[i].norm().max(1e-300);
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }
    if !done.iter().all(|&d| d) {
        return Err(Error::RootNonConvergence { iterations: MAX_ITER });
    }

    let mut out: Vec<Complex64> = z.into_iter().map(|y| y * scale).collect();
    for r in out.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = eval_with_derivative(&monic, *r);
            let step = p / dp;
            if step.is_finite() && step.norm() < 1e-6 * r.norm().max(1.0) {
                let candidate = *r - step;
                if eval(&monic, candidate).norm() <= p.norm() {
                    *r = candidate;
                }
            }
        }
    }
    Ok(out)
}
