//! Small dense numerical kernels.
//!
//! Everything here targets matrices of at most a few dozen rows: stage systems of implicit
//! Runge-Kutta schemes, saddle-point systems of the constrained integrators, Padé fits and the
//! Golub-Welsch eigenproblem. Algorithms favour accuracy and simplicity over asymptotics.

mod eigen;
mod matrix;
mod poly;
mod quadrature;
mod svd;

pub use eigen::{complex_hessenberg_eigenvalues, sym_eigen, sym_eigenvalues, SymEigen};
pub use matrix::Matrix;
pub use poly::{poly_derivative, poly_eval, poly_eval_with_derivative, poly_roots};
pub use quadrature::{gauss_laguerre, QuadratureRule};
pub use svd::{svd_small, Svd};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is singular (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("function evaluation produced a non-finite value")]
    NonFiniteEvaluation,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Solves `A x = b` by LU factorisation with partial pivoting.
pub fn solve_dense(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumericsError::DimensionMismatch(format!(
            "solve_dense needs a square matrix, got {}x{}",
            n,
            a.cols()
        )));
    }
    if b.len() != n {
        return Err(NumericsError::DimensionMismatch(format!(
            "right-hand side has length {}, expected {}",
            b.len(),
            n
        )));
    }
    let scale = a.max_abs();
    let threshold = 1e-14 * scale;
    let mut lu = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let (piv, piv_abs) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(piv_abs > threshold) {
            return Err(NumericsError::SingularMatrix {
                pivot: piv_abs,
                threshold,
            });
        }
        if piv != k {
            lu.swap_rows(piv, k);
            x.swap(piv, k);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            if factor == 0.0 {
                continue;
            }
            lu[(i, k)] = factor;
            for j in k + 1..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= factor * v;
            }
            x[i] -= factor * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= lu[(k, j)] * x[j];
        }
        x[k] = s / lu[(k, k)];
    }
    Ok(x)
}

/// Default central-difference step: cube root of machine epsilon scaled by the point.
pub fn default_fd_step(x: &[f64]) -> f64 {
    let norm = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    f64::EPSILON.cbrt() * norm.max(1.0)
}

/// Central-difference Jacobian of `f` at `x`.
///
/// Entry `(i, j)` is `(f_i(x + h e_j) - f_i(x - h e_j)) / (2h)`, where the divisor is the
/// difference of the two perturbed abscissae as actually represented in floating point. Linear
/// maps (in particular the identity) are therefore differentiated exactly up to rounding of `f`.
pub fn fd_jacobian<F>(mut f: F, x: &[f64], h: f64) -> Result<Matrix>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    if !(h > 0.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let n = x.len();
    let mut probe = x.to_vec();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut rows = None;
    for j in 0..n {
        let xp = x[j] + h;
        let xm = x[j] - h;
        probe[j] = xp;
        let fp = f(&probe);
        probe[j] = xm;
        let fm = f(&probe);
        probe[j] = x[j];
        let m = *rows.get_or_insert(fp.len());
        if fp.len() != m || fm.len() != m {
            return Err(NumericsError::DimensionMismatch(
                "function output length changed between evaluations".into(),
            ));
        }
        let width = xp - xm;
        let col: Vec<f64> = fp.iter().zip(&fm).map(|(a, b)| (a - b) / width).collect();
        if col.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::NonFiniteEvaluation);
        }
        columns.push(col);
    }
    let m = rows.unwrap_or(0);
    let mut jac = Matrix::zeros(m, n);
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            jac[(i, j)] = *v;
        }
    }
    Ok(jac)
}

/// Infinity norm of a vector.
pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Least-squares slope of `y` against `x`.
pub fn linear_trend(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return 0.0;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..n {
        let dx = x[i] - mx;
        sxy += dx * (y[i] - my);
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
