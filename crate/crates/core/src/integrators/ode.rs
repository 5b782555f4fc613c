//! Classical RK4 for general (possibly non-autonomous) first-order systems.

use crate::numerics::norm_inf;

use super::{IntegratorError, Result};

/// `y' = F(t, y)` on real vectors.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64]) -> Vec<f64>;
}

fn shifted(y: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(x, v)| x + a * v).collect()
}

pub fn rk4_ode_step<S: OdeSystem + ?Sized>(sys: &S, t: f64, y: &[f64], dt: f64) -> Result<Vec<f64>> {
    if y.len() != sys.dim() {
        return Err(IntegratorError::DimensionMismatch {
            expected: sys.dim(),
            got: y.len(),
        });
    }
    let k1 = sys.rhs(t, y);
    let k2 = sys.rhs(t + dt / 2.0, &shifted(y, dt / 2.0, &k1));
    let k3 = sys.rhs(t + dt / 2.0, &shifted(y, dt / 2.0, &k2));
    let k4 = sys.rhs(t + dt, &shifted(y, dt, &k3));
    let next: Vec<f64> = (0..y.len())
        .map(|i| y[i] + dt * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0)
        .collect();
    if next.iter().all(|v| v.is_finite()) {
        Ok(next)
    } else {
        Err(IntegratorError::NonFiniteEvaluation)
    }
}

/// RK4 with step-doubling error control: each step is compared against two half steps and
/// accepted when the difference is below `tol` in the max norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveRk4 {
    pub tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
}

impl AdaptiveRk4 {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            initial_step: 1e-3,
            min_step: 1e-12,
            max_step: f64::INFINITY,
        }
    }

    /// Attempts steps from `(t, y)` starting with `dt` until one is accepted, never passing
    /// `t_final`. Returns the accepted step.
    pub fn step<S: OdeSystem + ?Sized>(&self, sys: &S, t: f64, y: &[f64], dt: f64, t_final: f64) -> Result<AdaptiveStep> {
        let mut dt = dt.min(self.max_step);
        loop {
            let remaining = t_final - t;
            let last = dt >= remaining;
            let h = if last { remaining } else { dt };
            let full = rk4_ode_step(sys, t, y, h)?;
            let half = rk4_ode_step(sys, t, y, h / 2.0)?;
            let two = rk4_ode_step(sys, t + h / 2.0, &half, h / 2.0)?;
            let err = full
                .iter()
                .zip(&two)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            if !err.is_finite() || norm_inf(&two).is_nan() {
                return Err(IntegratorError::NonFiniteEvaluation);
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * (self.tol / err).powf(0.2)).clamp(0.2, 5.0)
            };
            if err <= self.tol {
                return Ok(AdaptiveStep {
                    t: if last { t_final } else { t + h },
                    state: two,
                    step: h,
                    next_step: if last { dt } else { (h * factor).min(self.max_step) },
                });
            }
            dt = h * factor;
            if dt < self.min_step {
                return Err(IntegratorError::StepCollapse(self.min_step));
            }
        }
    }

    /// Integrates from `(t0, y0)` to `t_final`, calling `observer(t, y, step)` after every
    /// accepted step. Returns the final state.
    pub fn integrate<S, O>(&self, sys: &S, t0: f64, y0: &[f64], t_final: f64, mut observer: O) -> Result<Vec<f64>>
    where
        S: OdeSystem + ?Sized,
        O: FnMut(f64, &[f64], f64),
    {
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut dt = self.initial_step;
        while t < t_final {
            let s = self.step(sys, t, &y, dt, t_final)?;
            t = s.t;
            y = s.state;
            dt = s.next_step;
            observer(t, &y, s.step);
        }
        Ok(y)
    }
}

/// Accepted step of [`AdaptiveRk4`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveStep {
    pub t: f64,
    pub state: Vec<f64>,
    pub step: f64,
    /// Proposal for the following step.
    pub next_step: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;

    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _: f64, y: &[f64]) -> Vec<f64> {
            vec![-y[0]]
        }
    }

    struct Forced;

    impl OdeSystem for Forced {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, t: f64, _: &[f64]) -> Vec<f64> {
            vec![t.cos()]
        }
    }

    #[test]
    fn fixed_step_decay() {
        let mut y = vec![1.0];
        for _ in 0..100 {
            y = rk4_ode_step(&Decay, 0.0, &y, 0.01).unwrap();
        }
        assert!((y[0] - (-1f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn nonautonomous_quadrature() {
        let mut y = vec![0.0];
        let mut t = 0.0;
        for _ in 0..200 {
            y = rk4_ode_step(&Forced, t, &y, 0.01).unwrap();
            t += 0.01;
        }
        assert!((y[0] - 2f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn adaptive_hits_final_time_and_tolerance() {
        let mut steps = Vec::new();
        let mut last_t = 0.0;
        let y = AdaptiveRk4::new(1e-10)
            .integrate(&Decay, 0.0, &[1.0], 5.0, |t, _, h| {
                assert!(t > last_t);
                last_t = t;
                steps.push(h);
            })
            .unwrap();
        assert_eq!(last_t, 5.0);
        assert!((y[0] - (-5f64).exp()).abs() < 1e-8);
        assert!(steps.len() > 5);
        let coarse = AdaptiveRk4::new(1e-6)
            .integrate(&Decay, 0.0, &[1.0], 5.0, |_, _, _| {})
            .unwrap();
        assert!((coarse[0] - (-5f64).exp()).abs() < 1e-4);
    }
}
