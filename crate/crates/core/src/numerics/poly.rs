//! Polynomials with complex coefficients stored in ascending order (`c[0] + c[1] z + ...`).

use num_complex::Complex64;

use super::{complex_hessenberg_eigenvalues, Result};

pub fn poly_eval(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

/// Value and first derivative by Horner's scheme.
pub fn poly_eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

pub fn poly_derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| a * k as f64)
        .collect()
}

/// Roots of a polynomial as eigenvalues of its companion matrix, each polished by a few Newton
/// iterations. Leading (highest-order) zero coefficients are ignored.
pub fn poly_roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = match c.iter().rposition(|a| *a != Complex64::new(0.0, 0.0)) {
        Some(d) => d,
        None => return Ok(Vec::new()),
    };
    let mut roots = Vec::with_capacity(degree);
    // exact zero roots
    let low = c.iter().position(|a| *a != Complex64::new(0.0, 0.0)).unwrap_or(0);
    roots.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), low));
    let reduced = &c[low..=degree];
    let n = reduced.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    let lead = reduced[n];
    let mut h = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        h[j] = -reduced[n - 1 - j] / lead;
    }
    for i in 1..n {
        h[i * n + i - 1] = Complex64::new(1.0, 0.0);
    }
    let eig = complex_hessenberg_eigenvalues(&h, n)?;
    for mut z in eig {
        for _ in 0..3 {
            let (p, dp) = poly_eval_with_derivative(reduced, z);
            if dp.norm() == 0.0 || !p.is_finite() {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            let candidate = z - step;
            if poly_eval(reduced, candidate).norm() <= p.norm() {
                z = candidate;
            } else {
                break;
            }
        }
        roots.push(z);
    }
    Ok(roots)
}
