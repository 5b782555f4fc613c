use crate::hamiltonian::HamiltonianSystem;
use crate::integrators::{rk4_step, IntegratorError};

use super::{ProblemError, Result};

/// Period of the figure-eight choreography with unit masses and `G = 1`.
pub const FIGURE_EIGHT_PERIOD: f64 = 6.32591398;

const COLLISION_DISTANCE: f64 = 1e-8;

/// Planar gravitational n-body problem.
///
/// Phase layout: `q = (x_1, y_1, .., x_n, y_n)` followed by the momenta in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct NBody {
    masses: Vec<f64>,
    g: f64,
}

impl NBody {
    pub fn new(masses: Vec<f64>, g: f64) -> Result<Self> {
        if masses.is_empty() || masses.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(ProblemError::InvalidParameter(
                "n-body masses must be positive and finite".into(),
            ));
        }
        if !g.is_finite() {
            return Err(ProblemError::InvalidParameter("G must be finite".into()));
        }
        Ok(Self { masses, g })
    }

    pub fn bodies(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.bodies();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    fn distance(q: &[f64], i: usize, j: usize) -> f64 {
        (q[2 * j] - q[2 * i]).hypot(q[2 * j + 1] - q[2 * i + 1])
    }

    /// Fails when two bodies are closer than `1e-8`.
    pub fn check_collision(&self, u: &[f64]) -> Result<()> {
        for (i, j) in self.pairs() {
            let r = Self::distance(u, i, j);
            if !(r > COLLISION_DISTANCE) {
                return Err(ProblemError::CollisionSingularity { i, j, distance: r });
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self, u: &[f64]) -> Result<f64> {
        self.check_collision(u)?;
        Ok(self.energy(u))
    }

    /// Planar angular momentum `Σ (x_k p_{y,k} - y_k p_{x,k})`.
    pub fn angular_momentum(&self, u: &[f64]) -> f64 {
        let off = 2 * self.bodies();
        (0..self.bodies())
            .map(|k| u[2 * k] * u[off + 2 * k + 1] - u[2 * k + 1] * u[off + 2 * k])
            .sum()
    }

    pub fn linear_momentum(&self, u: &[f64]) -> [f64; 2] {
        let off = 2 * self.bodies();
        let mut p = [0.0; 2];
        for k in 0..self.bodies() {
            p[0] += u[off + 2 * k];
            p[1] += u[off + 2 * k + 1];
        }
        p
    }

    pub fn center_of_mass(&self, u: &[f64]) -> [f64; 2] {
        let total: f64 = self.masses.iter().sum();
        let mut c = [0.0; 2];
        for (k, m) in self.masses.iter().enumerate() {
            c[0] += m * u[2 * k] / total;
            c[1] += m * u[2 * k + 1] / total;
        }
        c
    }

    /// Three unit masses on the figure-eight choreography (`G = 1`).
    pub fn figure_eight() -> (Self, Vec<f64>) {
        let x1 = [0.97000436, -0.24308753];
        let v3 = [-0.93240737, -0.86473146];
        let q = [x1[0], x1[1], -x1[0], -x1[1], 0.0, 0.0];
        let p = [
            -0.5 * v3[0],
            -0.5 * v3[1],
            -0.5 * v3[0],
            -0.5 * v3[1],
            v3[0],
            v3[1],
        ];
        let sys = Self::new(vec![1.0; 3], 1.0).expect("unit masses are valid");
        (sys, q.iter().chain(&p).copied().collect())
    }

    /// Figure-eight data with the middle body (index 2, starting at the origin) replaced by its
    /// position and momentum at `t = T/80`, obtained with fine RK4 steps.
    pub fn figure_eight_perturbed() -> std::result::Result<(Self, Vec<f64>), IntegratorError> {
        let (sys, u0) = Self::figure_eight();
        let steps = 4000;
        let dt = FIGURE_EIGHT_PERIOD / 80.0 / steps as f64;
        let mut u = u0.clone();
        for _ in 0..steps {
            u = rk4_step(&sys, &u, dt)?;
        }
        let mut out = u0;
        for idx in [4, 5, 10, 11] {
            out[idx] = u[idx];
        }
        Ok((sys, out))
    }
}

impl HamiltonianSystem for NBody {
    fn dof(&self) -> usize {
        2 * self.bodies()
    }

    fn energy(&self, u: &[f64]) -> f64 {
        let off = 2 * self.bodies();
        let kinetic: f64 = self
            .masses
            .iter()
            .enumerate()
            .map(|(k, m)| 0.5 * (u[off + 2 * k].powi(2) + u[off + 2 * k + 1].powi(2)) / m)
            .sum();
        let potential: f64 = self
            .pairs()
            .map(|(i, j)| -self.g * self.masses[i] * self.masses[j] / Self::distance(u, i, j))
            .sum();
        kinetic + potential
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let n = self.bodies();
        let off = 2 * n;
        let mut g = vec![0.0; 4 * n];
        for (i, j) in self.pairs() {
            let dx = u[2 * j] - u[2 * i];
            let dy = u[2 * j + 1] - u[2 * i + 1];
            let r2 = dx * dx + dy * dy;
            let s = self.g * self.masses[i] * self.masses[j] / (r2 * r2.sqrt());
            // ∂/∂q_i of -G m_i m_j / r = -G m_i m_j (q_j - q_i) / r³
            g[2 * i] -= s * dx;
            g[2 * i + 1] -= s * dy;
            g[2 * j] += s * dx;
            g[2 * j + 1] += s * dy;
        }
        for (k, m) in self.masses.iter().enumerate() {
            g[off + 2 * k] = u[off + 2 * k] / m;
            g[off + 2 * k + 1] = u[off + 2 * k + 1] / m;
        }
        g
    }

    fn is_separable(&self) -> bool {
        true
    }
}
