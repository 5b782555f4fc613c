use num_complex::Complex64;

use crate::bpl::{cauchy, TaylorGenerator};
use crate::integrators::OdeSystem;

/// Forcing amplitudes of the chaotic Duffing scenarios.
pub const FORCED_AMPLITUDES: [f64; 6] = [0.20, 0.28, 0.29, 0.37, 0.50, 0.65];

/// `ü + r u̇ + a u + b u³ = c cos(ω t)` as the first-order system on `(u, u̇)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuffingProblem {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub c: f64,
    pub omega: f64,
}

impl DuffingProblem {
    /// `a = 2/9, b = 1, r = -1, c = 0`, which admits the first integral [`duffing_i1`].
    pub fn case1() -> Self {
        Self {
            a: 2.0 / 9.0,
            b: 1.0,
            r: -1.0,
            c: 0.0,
            omega: 0.0,
        }
    }

    /// Undamped, unforced quartic oscillator, conserving [`duffing_h2`].
    pub fn case2() -> Self {
        Self {
            a: 1.0,
            b: 1.0,
            r: 0.0,
            c: 0.0,
            omega: 0.0,
        }
    }

    /// Double-well oscillator `a = -1, b = 1, r = 0.3, ω = 1.2` with forcing amplitude `c`.
    pub fn forced(c: f64) -> Self {
        Self {
            a: -1.0,
            b: 1.0,
            r: 0.3,
            c,
            omega: 1.2,
        }
    }

    pub fn initial() -> [f64; 2] {
        [1.0, 0.0]
    }

    pub fn rhs_real(&self, y: &[f64], t: f64) -> [f64; 2] {
        let (u, v) = (y[0], y[1]);
        [
            v,
            -self.r * v - self.a * u - self.b * u * u * u + self.c * (self.omega * t).cos(),
        ]
    }
}

/// `I₁ = e^{-4t/3} (u̇² - (2/3) u u̇ + u²/9 + u⁴/2)`, constant for [`DuffingProblem::case1`].
pub fn duffing_i1(u: f64, v: f64, t: f64) -> f64 {
    (-4.0 * t / 3.0).exp() * (v * v - 2.0 / 3.0 * u * v + u * u / 9.0 + 0.5 * u.powi(4))
}

/// `H₂ = u̇²/2 + u²/2 + u⁴/4`, constant for [`DuffingProblem::case2`].
pub fn duffing_h2(u: f64, v: f64) -> f64 {
    0.5 * v * v + 0.5 * u * u + 0.25 * u.powi(4)
}

impl OdeSystem for DuffingProblem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[f64]) -> Vec<f64> {
        self.rhs_real(y, t).to_vec()
    }
}

impl TaylorGenerator for DuffingProblem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, y: &[Complex64], t: f64) -> Vec<Complex64> {
        let (u, v) = (y[0], y[1]);
        vec![
            v,
            -v * self.r - u * self.a - u * u * u * self.b + self.c * (self.omega * t).cos(),
        ]
    }

    fn next_coefficient(&self, prefix: &[Vec<Complex64>], t0: f64) -> Vec<Complex64> {
        let n = prefix.len() - 1;
        let k1 = (n + 1) as f64;
        let u: Vec<Complex64> = prefix.iter().map(|c| c[0]).collect();
        let u2: Vec<Complex64> = (0..=n).map(|i| cauchy(&u, &u, i)).collect();
        let u3 = cauchy(&u2, &u, n);
        // n-th Taylor coefficient of cos(ω(t0 + τ)) in τ: ωⁿ/n! cos(ω t0 + nπ/2)
        let forcing = if self.c == 0.0 {
            0.0
        } else {
            let mut w = 1.0;
            for i in 1..=n {
                w *= self.omega / i as f64;
            }
            self.c * w * (self.omega * t0 + n as f64 * std::f64::consts::FRAC_PI_2).cos()
        };
        let v_n = prefix[n][1];
        vec![
            v_n / k1,
            (-v_n * self.r - u[n] * self.a - u3 * self.b + forcing) / k1,
        ]
    }
}
