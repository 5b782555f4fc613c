use std::f64::consts::FRAC_PI_2;

use crate::dirac::{self, ConstrainedSystem, DiracState};
use crate::numerics::Matrix;

/// Unconstrained particle with a diagonal mass matrix and no potential.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeParticle {
    pub masses: Vec<f64>,
}

impl FreeParticle {
    pub fn new(masses: Vec<f64>) -> Self {
        Self { masses }
    }
}

impl ConstrainedSystem for FreeParticle {
    fn dim(&self) -> usize {
        self.masses.len()
    }

    fn constraint_count(&self) -> usize {
        0
    }

    fn mass(&self) -> Matrix {
        Matrix::diagonal(&self.masses)
    }

    fn potential(&self, _: &[f64]) -> f64 {
        0.0
    }

    fn grad_potential(&self, q: &[f64]) -> Vec<f64> {
        vec![0.0; q.len()]
    }

    fn constraints(&self, _: &[f64]) -> Vec<f64> {
        Vec::new()
    }

    fn constraint_gradients(&self, q: &[f64]) -> Matrix {
        Matrix::zeros(0, q.len())
    }
}

/// Unit mass on a rod of length `ℓ` in Cartesian coordinates, `φ = ‖q‖² - ℓ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplePendulum {
    pub length: f64,
    pub g: f64,
}

impl SimplePendulum {
    pub fn new(length: f64, g: f64) -> Self {
        Self { length, g }
    }
}

impl ConstrainedSystem for SimplePendulum {
    fn dim(&self) -> usize {
        2
    }

    fn constraint_count(&self) -> usize {
        1
    }

    fn mass(&self) -> Matrix {
        Matrix::identity(2)
    }

    fn potential(&self, q: &[f64]) -> f64 {
        self.g * q[1]
    }

    fn grad_potential(&self, _: &[f64]) -> Vec<f64> {
        vec![0.0, self.g]
    }

    fn constraints(&self, q: &[f64]) -> Vec<f64> {
        vec![q[0] * q[0] + q[1] * q[1] - self.length * self.length]
    }

    fn constraint_gradients(&self, q: &[f64]) -> Matrix {
        Matrix::from_vec(1, 2, vec![2.0 * q[0], 2.0 * q[1]])
    }

    fn constraint_hessian(&self, _: usize, _: &[f64]) -> dirac::Result<Matrix> {
        Ok(Matrix::identity(2).scale(2.0))
    }
}

/// Planar double pendulum in Cartesian coordinates `q = (x₁, y₁, x₂, y₂)`, gravity along `-y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublePendulum {
    pub m1: f64,
    pub m2: f64,
    pub l1: f64,
    pub l2: f64,
    pub g: f64,
    /// Initial angles from the downward vertical.
    pub theta1: f64,
    pub theta2: f64,
}

impl Default for DoublePendulum {
    fn default() -> Self {
        Self {
            m1: 1.0,
            m2: 1.0,
            l1: 1.0,
            l2: 1.0,
            g: 9.81,
            theta1: FRAC_PI_2,
            theta2: FRAC_PI_2,
        }
    }
}

impl DoublePendulum {
    pub fn configuration(&self, theta1: f64, theta2: f64) -> Vec<f64> {
        let (x1, y1) = (self.l1 * theta1.sin(), -self.l1 * theta1.cos());
        vec![x1, y1, x1 + self.l2 * theta2.sin(), y1 - self.l2 * theta2.cos()]
    }

    /// Rest state at the configured angles.
    pub fn initial_state(&self) -> DiracState {
        DiracState {
            q: self.configuration(self.theta1, self.theta2),
            p: vec![0.0; 4],
            prev_q: None,
            lambda: vec![0.0; 2],
        }
    }

    /// Angles of both rods from the downward vertical.
    pub fn angles(q: &[f64]) -> [f64; 2] {
        [q[0].atan2(-q[1]), (q[2] - q[0]).atan2(-(q[3] - q[1]))]
    }
}

impl ConstrainedSystem for DoublePendulum {
    fn dim(&self) -> usize {
        4
    }

    fn constraint_count(&self) -> usize {
        2
    }

    fn mass(&self) -> Matrix {
        Matrix::diagonal(&[self.m1, self.m1, self.m2, self.m2])
    }

    fn potential(&self, q: &[f64]) -> f64 {
        self.g * (self.m1 * q[1] + self.m2 * q[3])
    }

    fn grad_potential(&self, _: &[f64]) -> Vec<f64> {
        vec![0.0, self.g * self.m1, 0.0, self.g * self.m2]
    }

    fn constraints(&self, q: &[f64]) -> Vec<f64> {
        let (dx, dy) = (q[2] - q[0], q[3] - q[1]);
        vec![
            q[0] * q[0] + q[1] * q[1] - self.l1 * self.l1,
            dx * dx + dy * dy - self.l2 * self.l2,
        ]
    }

    fn constraint_gradients(&self, q: &[f64]) -> Matrix {
        let (dx, dy) = (q[2] - q[0], q[3] - q[1]);
        Matrix::from_rows(&[
            vec![2.0 * q[0], 2.0 * q[1], 0.0, 0.0],
            vec![-2.0 * dx, -2.0 * dy, 2.0 * dx, 2.0 * dy],
        ])
    }

    fn constraint_hessian(&self, a: usize, _: &[f64]) -> dirac::Result<Matrix> {
        let mut h = Matrix::zeros(4, 4);
        if a == 0 {
            h[(0, 0)] = 2.0;
            h[(1, 1)] = 2.0;
        } else {
            for i in 0..2 {
                h[(i, i)] = 2.0;
                h[(i + 2, i + 2)] = 2.0;
                h[(i, i + 2)] = -2.0;
                h[(i + 2, i)] = -2.0;
            }
        }
        Ok(h)
    }
}
