use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bpl::TaylorGenerator;

use super::{ProblemError, Result};

/// Periodic KdV equation `u_t + c₀ u_x + β u_xxx + (α/2)(u²)_x = 0` in Fourier space.
///
/// The state holds the modes `û^m`, `m = -M..M`, at index `m + M`, with conjugate symmetry
/// `û^{-m} = conj(û^m)` for a real field `u(x) = Σ û^m e^{imωx}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KdvSpectral {
    pub m_max: usize,
    /// Spatial period `X`.
    pub period_x: f64,
    pub depth: f64,
    pub gravity: f64,
    /// Soliton amplitude `h`.
    pub amplitude: f64,
    pub c0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub kappa: f64,
    /// Soliton speed `c = c₀ (1 + h / 2δ)`.
    pub speed: f64,
}

impl KdvSpectral {
    pub fn new(m_max: usize, period_x: f64, depth: f64, gravity: f64, amplitude: f64) -> Result<Self> {
        if m_max == 0 {
            return Err(ProblemError::InvalidParameter("KdV needs at least one mode".into()));
        }
        for (name, v) in [("X", period_x), ("depth", depth), ("g", gravity), ("h", amplitude)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ProblemError::InvalidParameter(format!(
                    "KdV parameter {name} must be positive, got {v}"
                )));
            }
        }
        let c0 = (gravity * depth).sqrt();
        Ok(Self {
            m_max,
            period_x,
            depth,
            gravity,
            amplitude,
            c0,
            alpha: 1.5 * (gravity / depth).sqrt(),
            beta: depth * depth * c0 / 6.0,
            omega: 2.0 * PI / period_x,
            kappa: (3.0 * amplitude / (4.0 * depth.powi(3))).sqrt(),
            speed: c0 * (1.0 + amplitude / (2.0 * depth)),
        })
    }

    /// `X = 24π`, `δ = 2`, `g = 10`, `h = 1/2` with `M` modes on each side.
    pub fn benchmark(m_max: usize) -> Result<Self> {
        Self::new(m_max, 24.0 * PI, 2.0, 10.0, 0.5)
    }

    pub fn modes(&self) -> usize {
        2 * self.m_max + 1
    }

    /// Time for the soliton to travel one spatial period.
    pub fn time_period(&self) -> f64 {
        self.period_x / self.speed
    }

    fn wavenumber(&self, idx: usize) -> f64 {
        idx as f64 - self.m_max as f64
    }

    /// Linear symbol `-i c₀ ω m + i β ω³ m³`.
    fn linear(&self, m: f64) -> Complex64 {
        let w = self.omega * m;
        Complex64::new(0.0, -self.c0 * w + self.beta * w * w * w)
    }

    /// Periodic prolongation of `h sech²(κx)` from `[-X/2, X/2]`.
    pub fn initial_profile(&self, x: f64) -> f64 {
        let xr = x - self.period_x * (x / self.period_x).round();
        (-2..=2)
            .map(|k| {
                let s = 1.0 / (self.kappa * (xr + k as f64 * self.period_x)).cosh();
                self.amplitude * s * s
            })
            .sum()
    }

    /// Exact travelling wave `u₀(x - ct)`.
    pub fn exact(&self, x: f64, t: f64) -> f64 {
        self.initial_profile(x - self.speed * t)
    }

    /// Fourier coefficients of the initial profile by the trapezoidal rule on `2M+1` points.
    pub fn initial(&self) -> Vec<Complex64> {
        let n = self.modes();
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let x = -0.5 * self.period_x + j as f64 * self.period_x / n as f64;
                (x, self.initial_profile(x))
            })
            .collect();
        let mut u: Vec<Complex64> = (0..n)
            .map(|idx| {
                let m = self.wavenumber(idx);
                samples
                    .iter()
                    .map(|(x, v)| Complex64::from_polar(*v, -m * self.omega * x))
                    .sum::<Complex64>()
                    / n as f64
            })
            .collect();
        self.project(&mut u);
        u
    }

    /// Coefficients of the exact solution: `û^m(0) e^{-imωct}`.
    pub fn exact_coefficients(&self, t: f64) -> Vec<Complex64> {
        let u0 = self.initial();
        let mut u: Vec<Complex64> = u0
            .iter()
            .enumerate()
            .map(|(idx, z)| z * Complex64::from_polar(1.0, -self.wavenumber(idx) * self.omega * self.speed * t))
            .collect();
        self.project(&mut u);
        u
    }

    /// `L²` distance over one spatial period to the exact solution at time `t`, by Parseval.
    pub fn l2_error(&self, u: &[Complex64], t: f64) -> f64 {
        let exact = self.exact_coefficients(t);
        let sum: f64 = u.iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum();
        (self.period_x * sum).sqrt()
    }

    /// Physical field `Σ û^m e^{imωx}` (real part).
    pub fn field(&self, u: &[Complex64], x: f64) -> f64 {
        u.iter()
            .enumerate()
            .map(|(idx, z)| (z * Complex64::from_polar(1.0, self.wavenumber(idx) * self.omega * x)).re)
            .sum()
    }

    /// Largest violation of `û^{-m} = conj(û^m)`.
    pub fn symmetry_defect(&self, u: &[Complex64]) -> f64 {
        let n = self.modes();
        (0..n).fold(0.0_f64, |m, i| m.max((u[i] - u[n - 1 - i].conj()).norm()))
    }

    /// Truncated convolution `(a * b)_m = Σ_{m₁+m₂=m} a_{m₁} b_{m₂}`, `|m|, |m₁|, |m₂| ≤ M`.
    fn convolve(&self, a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
        let mm = self.m_max as isize;
        let n = self.modes() as isize;
        for (i, ai) in a.iter().enumerate() {
            if *ai == Complex64::new(0.0, 0.0) {
                continue;
            }
            let m1 = i as isize - mm;
            // m = m1 + m2 must satisfy |m| ≤ M
            let lo = (-mm - m1).max(-mm);
            let hi = (mm - m1).min(mm);
            for m2 in lo..=hi {
                let j = (m2 + mm) as usize;
                let k = (m1 + m2 + mm) as usize;
                debug_assert!((k as isize) < n);
                out[k] += ai * b[j];
            }
        }
    }

    /// Next Taylor coefficient: `û_{k+1} = [L_m û_k - (i α m ω / 2) Σ_{n ≤ k} û_n * û_{k-n}] / (k+1)`.
    pub fn taylor_step(&self, prefix: &[Vec<Complex64>]) -> Vec<Complex64> {
        let k = prefix.len() - 1;
        let n = self.modes();
        let mut conv = vec![Complex64::new(0.0, 0.0); n];
        // exploit symmetry of the Cauchy sum: û_i * û_{k-i} = û_{k-i} * û_i
        for i in 0..=k / 2 {
            let j = k - i;
            let mut part = vec![Complex64::new(0.0, 0.0); n];
            self.convolve(&prefix[i], &prefix[j], &mut part);
            let w = if i == j { 1.0 } else { 2.0 };
            for (c, p) in conv.iter_mut().zip(&part) {
                *c += p * w;
            }
        }
        let k1 = (k + 1) as f64;
        let mut out: Vec<Complex64> = (0..n)
            .map(|idx| {
                let m = self.wavenumber(idx);
                let nonlinear = Complex64::new(0.0, -0.5 * self.alpha * m * self.omega);
                (self.linear(m) * prefix[k][idx] + nonlinear * conv[idx]) / k1
            })
            .collect();
        self.project(&mut out);
        out
    }
}

impl TaylorGenerator for KdvSpectral {
    fn dim(&self) -> usize {
        self.modes()
    }

    fn rhs(&self, u: &[Complex64], _: f64) -> Vec<Complex64> {
        let n = self.modes();
        let mut conv = vec![Complex64::new(0.0, 0.0); n];
        self.convolve(u, u, &mut conv);
        (0..n)
            .map(|idx| {
                let m = self.wavenumber(idx);
                self.linear(m) * u[idx] + Complex64::new(0.0, -0.5 * self.alpha * m * self.omega) * conv[idx]
            })
            .collect()
    }

    fn next_coefficient(&self, prefix: &[Vec<Complex64>], _: f64) -> Vec<Complex64> {
        self.taylor_step(prefix)
    }

    fn project(&self, u: &mut [Complex64]) {
        let n = u.len();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let avg = 0.5 * (u[i] + u[j].conj());
            u[i] = avg;
            u[j] = avg.conj();
        }
        if n % 2 == 1 {
            u[n / 2].im = 0.0;
        }
    }
}
