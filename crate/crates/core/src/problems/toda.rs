use num_complex::Complex64;

use crate::bpl::TaylorGenerator;
use crate::hamiltonian::HamiltonianSystem;
use crate::numerics::{sym_eigenvalues, Matrix, NumericsError};

use super::{ProblemError, Result};

/// Periodic Toda lattice `H = Σ (p_k²/2 + e^{q_k - q_{k+1}})` with `q_{d+1} = q_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TodaLattice {
    d: usize,
}

impl TodaLattice {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(ProblemError::InvalidParameter(format!(
                "Toda lattice needs at least 2 particles, got {d}"
            )));
        }
        Ok(Self { d })
    }

    pub fn particles(&self) -> usize {
        self.d
    }

    /// Three-particle benchmark: `q = (0, 2, 3)`, `p = (0.5, -1.5, 1)`.
    pub fn benchmark() -> (Self, Vec<f64>) {
        (Self { d: 3 }, vec![0.0, 2.0, 3.0, 0.5, -1.5, 1.0])
    }

    fn next(&self, k: usize) -> usize {
        (k + 1) % self.d
    }

    /// Lax matrix: diagonal `a_k = -p_k/2`, off-diagonal and corner entries
    /// `b_k = e^{(q_k - q_{k+1})/2} / 2`.
    pub fn lax_matrix(&self, u: &[f64]) -> Matrix {
        let d = self.d;
        let mut l = Matrix::zeros(d, d);
        for k in 0..d {
            l[(k, k)] = -0.5 * u[d + k];
            let j = self.next(k);
            let b = 0.5 * (0.5 * (u[k] - u[j])).exp();
            l[(k, j)] += b;
            l[(j, k)] += b;
        }
        l
    }

    pub fn lax_eigenvalues(&self, u: &[f64]) -> std::result::Result<Vec<f64>, NumericsError> {
        sym_eigenvalues(&self.lax_matrix(u))
    }
}

impl HamiltonianSystem for TodaLattice {
    fn dof(&self) -> usize {
        self.d
    }

    fn energy(&self, u: &[f64]) -> f64 {
        let d = self.d;
        (0..d)
            .map(|k| 0.5 * u[d + k] * u[d + k] + (u[k] - u[self.next(k)]).exp())
            .sum()
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let d = self.d;
        let mut g = vec![0.0; 2 * d];
        for k in 0..d {
            let e = (u[k] - u[self.next(k)]).exp();
            g[k] += e;
            g[self.next(k)] -= e;
            g[d + k] = u[d + k];
        }
        g
    }

    fn is_separable(&self) -> bool {
        true
    }

    fn hessian(&self, u: &[f64]) -> std::result::Result<Matrix, NumericsError> {
        let d = self.d;
        let mut h = Matrix::zeros(2 * d, 2 * d);
        for k in 0..d {
            let j = self.next(k);
            let e = (u[k] - u[j]).exp();
            h[(k, k)] += e;
            h[(j, j)] += e;
            h[(k, j)] -= e;
            h[(j, k)] -= e;
            h[(d + k, d + k)] = 1.0;
        }
        Ok(h)
    }
}

impl TaylorGenerator for TodaLattice {
    fn dim(&self) -> usize {
        2 * self.d
    }

    fn rhs(&self, u: &[Complex64], _: f64) -> Vec<Complex64> {
        let d = self.d;
        let mut f = vec![Complex64::new(0.0, 0.0); 2 * d];
        for k in 0..d {
            f[k] = u[d + k];
            let e = (u[k] - u[self.next(k)]).exp();
            f[d + k] -= e;
            f[d + self.next(k)] += e;
        }
        f
    }

    fn next_coefficient(&self, prefix: &[Vec<Complex64>], _: f64) -> Vec<Complex64> {
        let d = self.d;
        let n = prefix.len() - 1;
        let k1 = (n + 1) as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * d];
        for k in 0..d {
            out[k] = prefix[n][d + k] / k1;
        }
        for k in 0..d {
            let j = self.next(k);
            // series of e^{s} with s = q_k - q_j: (i+1) E_{i+1} = Σ_{l ≤ i} (l+1) s_{l+1} E_{i-l}
            let s: Vec<Complex64> = prefix.iter().map(|c| c[k] - c[j]).collect();
            let mut e = Vec::with_capacity(n + 1);
            e.push(s[0].exp());
            for i in 0..n {
                let acc: Complex64 = (0..=i).map(|l| s[l + 1] * e[i - l] * (l + 1) as f64).sum();
                e.push(acc / (i + 1) as f64);
            }
            out[d + k] -= e[n] / k1;
            out[d + j] += e[n] / k1;
        }
        out
    }
}
