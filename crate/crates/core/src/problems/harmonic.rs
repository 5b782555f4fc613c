use num_complex::Complex64;

use crate::bpl::TaylorGenerator;
use crate::hamiltonian::HamiltonianSystem;
use crate::numerics::Matrix;

/// `H = Σ (p_k² + q_k²) / 2` in `d` uncoupled degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicOscillator {
    pub d: usize,
}

impl Default for HarmonicOscillator {
    fn default() -> Self {
        Self { d: 1 }
    }
}

impl HarmonicOscillator {
    /// Exact flow: rotation of each `(q_k, p_k)` pair by angle `t`.
    pub fn exact(&self, u: &[f64], t: f64) -> Vec<f64> {
        let (c, s) = (t.cos(), t.sin());
        let d = self.d;
        let mut out = vec![0.0; 2 * d];
        for k in 0..d {
            out[k] = c * u[k] + s * u[d + k];
            out[d + k] = -s * u[k] + c * u[d + k];
        }
        out
    }
}

impl HamiltonianSystem for HarmonicOscillator {
    fn dof(&self) -> usize {
        self.d
    }

    fn energy(&self, u: &[f64]) -> f64 {
        0.5 * u.iter().map(|x| x * x).sum::<f64>()
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        u.to_vec()
    }

    fn is_separable(&self) -> bool {
        true
    }

    fn hessian(&self, u: &[f64]) -> Result<Matrix, crate::numerics::NumericsError> {
        Ok(Matrix::identity(u.len()))
    }
}

impl TaylorGenerator for HarmonicOscillator {
    fn dim(&self) -> usize {
        2 * self.d
    }

    fn rhs(&self, u: &[Complex64], _: f64) -> Vec<Complex64> {
        let d = self.d;
        u[d..].iter().copied().chain(u[..d].iter().map(|z| -z)).collect()
    }

    fn next_coefficient(&self, prefix: &[Vec<Complex64>], _: f64) -> Vec<Complex64> {
        let n = prefix.len() - 1;
        let k = (n + 1) as f64;
        self.rhs(&prefix[n], 0.0).into_iter().map(|z| z / k).collect()
    }
}
