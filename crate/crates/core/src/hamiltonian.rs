//! Canonical Hamiltonian systems, the symplectic pairing and symplecticity diagnostics.
//!
//! Phase vectors are stored as `(q_1..q_d, p_1..p_d)`. The canonical matrix `J` maps
//! `(v_q, v_p)` to `(v_p, -v_q)`, so Hamilton's equations read `u' = J ∇H(u)`.

use std::ops::Deref;

use thiserror::Error;

use crate::numerics::{default_fd_step, fd_jacobian, Matrix, NumericsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("phase vector must have even length, got {0}")]
    OddLength(usize),
    #[error("vectors have different lengths ({left} and {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("phase vector contains a non-finite entry")]
    NonFinite,
    #[error("initial energy is zero; relative drift undefined")]
    ZeroInitialEnergy,
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("stepper failed while probing: {0}")]
    Stepper(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, HamiltonianError>;

/// Point `(q, p)` of a `2d`-dimensional phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    u: Vec<f64>,
}

impl PhaseState {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.len() % 2 != 0 {
            return Err(HamiltonianError::OddLength(u.len()));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(HamiltonianError::NonFinite);
        }
        Ok(Self { u })
    }

    pub fn from_parts(q: &[f64], p: &[f64]) -> Result<Self> {
        if q.len() != p.len() {
            return Err(HamiltonianError::LengthMismatch {
                left: q.len(),
                right: p.len(),
            });
        }
        let mut u = q.to_vec();
        u.extend_from_slice(p);
        Self::new(u)
    }

    pub fn dof(&self) -> usize {
        self.u.len() / 2
    }

    pub fn q(&self) -> &[f64] {
        &self.u[..self.dof()]
    }

    pub fn p(&self) -> &[f64] {
        &self.u[self.dof()..]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.u
    }
}

impl Deref for PhaseState {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.u
    }
}

/// An autonomous Hamiltonian `H(q, p)` with its gradient.
pub trait HamiltonianSystem {
    /// Number of degrees of freedom `d`.
    fn dof(&self) -> usize;

    fn energy(&self, u: &[f64]) -> f64;

    /// `(∂H/∂q, ∂H/∂p)` stacked in the phase-vector layout.
    fn gradient(&self, u: &[f64]) -> Vec<f64>;

    /// True when `H = T(p) + V(q)`, which lets the symplectic Euler family run explicitly.
    fn is_separable(&self) -> bool {
        false
    }

    /// Hessian of `H`; central differences of the gradient unless overridden.
    fn hessian(&self, u: &[f64]) -> std::result::Result<Matrix, NumericsError> {
        let h = default_fd_step(u);
        let jac = fd_jacobian(|x| self.gradient(x), u, h)?;
        let n = jac.rows();
        let mut sym = jac.clone();
        for i in 0..n {
            for j in 0..n {
                sym[(i, j)] = 0.5 * (jac[(i, j)] + jac[(j, i)]);
            }
        }
        Ok(sym)
    }

    /// Hamiltonian vector field `J ∇H(u)`.
    fn vector_field(&self, u: &[f64]) -> Vec<f64> {
        j_times(&self.gradient(u))
    }
}

fn j_times(v: &[f64]) -> Vec<f64> {
    let d = v.len() / 2;
    let mut out = Vec::with_capacity(v.len());
    out.extend_from_slice(&v[d..]);
    out.extend(v[..d].iter().map(|x| -x));
    out
}

/// Applies the canonical matrix: `(v_q, v_p) -> (v_p, -v_q)`.
pub fn apply_j(v: &[f64]) -> Result<Vec<f64>> {
    if v.len() % 2 != 0 {
        return Err(HamiltonianError::OddLength(v.len()));
    }
    Ok(j_times(v))
}

/// Symplectic pairing `vᵀ J w = Σ (v_q w_p - v_p w_q)`.
pub fn pairing(v: &[f64], w: &[f64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(HamiltonianError::LengthMismatch {
            left: v.len(),
            right: w.len(),
        });
    }
    if v.len() % 2 != 0 {
        return Err(HamiltonianError::OddLength(v.len()));
    }
    let d = v.len() / 2;
    Ok((0..d).map(|i| v[i] * w[d + i] - v[d + i] * w[i]).sum())
}

/// The `2d x 2d` canonical matrix with `J u = (u_p, -u_q)`.
pub fn canonical_j(d: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = 1.0;
        j[(d + i, i)] = -1.0;
    }
    j
}

/// `‖Gᵀ J G - J‖_F` for a square Jacobian `G`.
pub fn symplectic_form_defect(g: &Matrix) -> Result<f64> {
    if !g.is_square() || g.rows() % 2 != 0 {
        return Err(HamiltonianError::OddLength(g.rows()));
    }
    let j = canonical_j(g.rows() / 2);
    Ok(g.transpose().matmul(&j).matmul(g).sub(&j).frobenius_norm())
}

/// Symplecticity defect `‖(∇φ)ᵀ J ∇φ - J‖_F` of a one-step map at `u`, with `∇φ` obtained by
/// central differences at the default step.
pub fn symplecticity_defect<F, E>(mut step: F, u: &[f64]) -> Result<f64>
where
    F: FnMut(&[f64]) -> std::result::Result<Vec<f64>, E>,
    E: std::fmt::Display,
{
    if u.len() % 2 != 0 {
        return Err(HamiltonianError::OddLength(u.len()));
    }
    let mut failure = None;
    let jac = fd_jacobian(
        |x| match step(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert_with(|| e.to_string());
                vec![f64::NAN; x.len()]
            }
        },
        u,
        default_fd_step(u),
    );
    if let Some(msg) = failure {
        return Err(HamiltonianError::Stepper(msg));
    }
    symplectic_form_defect(&jac?)
}

/// Relative energy error `|H(uⁿ) - H(u⁰)| / |H(u⁰)|` along a trajectory.
pub fn hamiltonian_drift<S, T>(system: &S, trajectory: &[T]) -> Result<Vec<f64>>
where
    S: HamiltonianSystem + ?Sized,
    T: AsRef<[f64]>,
{
    let first = trajectory.first().ok_or(HamiltonianError::EmptyTrajectory)?;
    let h0 = system.energy(first.as_ref());
    if h0 == 0.0 {
        return Err(HamiltonianError::ZeroInitialEnergy);
    }
    Ok(trajectory
        .iter()
        .map(|u| ((system.energy(u.as_ref()) - h0) / h0).abs())
        .collect())
}

impl AsRef<[f64]> for PhaseState {
    fn as_ref(&self) -> &[f64] {
        &self.u
    }
}
