use num_complex::Complex64;

use crate::numerics::{poly_eval_with_derivative, poly_roots, svd_small, Matrix};

use super::{BplError, Result};

/// Singular values below this fraction of the largest one count as zero.
const RANK_TOL: f64 = 1e-12;

/// Rational function `(a_0 + a_1 ξ + ..) / (b_0 + b_1 ξ + ..)` with `b_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalApproximant {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

impl RationalApproximant {
    pub fn zero() -> Self {
        Self {
            num: vec![Complex64::new(0.0, 0.0)],
            den: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|a| *a == Complex64::new(0.0, 0.0))
    }

    pub fn num_degree(&self) -> usize {
        self.num.len().saturating_sub(1)
    }

    pub fn den_degree(&self) -> usize {
        self.den.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_derivative(z).0
    }

    /// Value and derivative `(a'b - ab') / b²`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let (a, da) = poly_eval_with_derivative(&self.num, z);
        let (b, db) = poly_eval_with_derivative(&self.den, z);
        let v = a / b;
        (v, (da - v * db) / b)
    }

    /// Roots of the denominator.
    pub fn poles(&self) -> Vec<Complex64> {
        poly_roots(&self.den).unwrap_or_default()
    }
}

/// Distance of a point from the closed positive real semi-axis.
fn distance_to_positive_axis(z: Complex64) -> f64 {
    if z.re >= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

/// Smallest distance from a denominator root to `[0, ∞)`; infinite when there is no pole.
pub fn pole_guard(p: &RationalApproximant) -> f64 {
    p.poles()
        .into_iter()
        .map(distance_to_positive_axis)
        .fold(f64::INFINITY, f64::min)
}

/// Denominator of the `[m/n]` fit: the smallest right singular vector of the Toeplitz block
/// `C[r][j] = c_{m+1+r-j}` (`r < n`, `j ≤ n`). Returns `None` when the block is rank deficient.
fn denominator(c: &[Complex64], m: usize, n: usize) -> Result<Option<Vec<Complex64>>> {
    let coef = |k: isize| -> Complex64 {
        if k < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            c[k as usize]
        }
    };
    if c.iter().all(|z| z.im == 0.0) {
        let cols = n + 1;
        let mut real = Matrix::zeros(cols, cols);
        for r in 0..n {
            for j in 0..=n {
                real[(r, j)] = coef(m as isize + 1 + r as isize - j as isize).re;
            }
        }
        let Some(v) = null_vector(&real, n)? else {
            return Ok(None);
        };
        return Ok(Some(v.into_iter().map(|x| Complex64::new(x, 0.0)).collect()));
    }
    // realify [[Re C, -Im C], [Im C, Re C]] and pad with zero rows to a square matrix
    let cols = 2 * (n + 1);
    let mut real = Matrix::zeros(cols, cols);
    for r in 0..n {
        for j in 0..=n {
            let z = coef(m as isize + 1 + r as isize - j as isize);
            real[(r, j)] = z.re;
            real[(r, n + 1 + j)] = -z.im;
            real[(n + r, j)] = z.im;
            real[(n + r, n + 1 + j)] = z.re;
        }
    }
    let Some(v) = null_vector(&real, 2 * n)? else {
        return Ok(None);
    };
    Ok(Some((0..=n).map(|j| Complex64::new(v[j], v[n + 1 + j])).collect()))
}

/// Right singular vector of the smallest singular value, or `None` below the expected rank.
fn null_vector(a: &Matrix, rank: usize) -> Result<Option<Vec<f64>>> {
    let svd = svd_small(a)?;
    let smax = svd.sigma[0];
    let found = if smax == 0.0 {
        0
    } else {
        svd.sigma.iter().filter(|s| **s > RANK_TOL * smax).count()
    };
    if found < rank {
        return Ok(None);
    }
    Ok(Some(svd.v.column(a.cols() - 1)))
}

/// Radius `ρ` making `c_k ρ^k` roughly level, so the fit is not dominated by one end of the
/// series.
fn balancing_radius(c: &[Complex64]) -> f64 {
    let Some(first) = c.iter().position(|z| z.norm() > 0.0) else {
        return 1.0;
    };
    let Some(last) = c.iter().rposition(|z| z.norm() > 0.0) else {
        return 1.0;
    };
    if last == first {
        return 1.0;
    }
    let rho = (c[first].norm() / c[last].norm()).powf(1.0 / (last - first) as f64);
    if rho.is_finite() && rho > 0.0 {
        rho
    } else {
        1.0
    }
}

/// Robust Padé fit `[m/n]` of the scalar series `c`.
///
/// The series is first rescaled to `c_k ρ^k` with level magnitudes, fitted, and mapped back.
/// Rank deficiency of the denominator system drops one denominator degree and refits, as does a
/// denominator whose constant term vanishes. The result is normalised to `b_0 = 1` with
/// negligible trailing coefficients trimmed.
pub fn pade_fit(c: &[Complex64], m: usize, n: usize) -> Result<RationalApproximant> {
    if m + n + 1 > c.len() {
        return Err(BplError::InvalidConfig(format!(
            "[{m}/{n}] Padé needs {} coefficients, got {}",
            m + n + 1,
            c.len()
        )));
    }
    if c.iter().any(|z| !z.is_finite()) {
        return Err(BplError::NonFiniteCoefficient(0));
    }
    let rho = balancing_radius(&c[..m + n + 1]);
    if rho == 1.0 {
        return pade_fit_balanced(c, m, n);
    }
    let scaled: Vec<Complex64> = c.iter().scan(1.0, |w, z| {
        let v = z * *w;
        *w *= rho;
        Some(v)
    }).collect();
    let mut p = pade_fit_balanced(&scaled, m, n)?;
    for coeffs in [&mut p.num, &mut p.den] {
        let mut w = 1.0;
        for a in coeffs.iter_mut() {
            *a *= w;
            w /= rho;
        }
    }
    Ok(p)
}

fn pade_fit_balanced(c: &[Complex64], m: usize, n: usize) -> Result<RationalApproximant> {
    if m + n + 1 > c.len() {
        return Err(BplError::InvalidConfig(format!(
            "[{m}/{n}] Padé needs {} coefficients, got {}",
            m + n + 1,
            c.len()
        )));
    }
    if c.iter().any(|z| !z.is_finite()) {
        return Err(BplError::NonFiniteCoefficient(0));
    }
    let scale = c.iter().fold(0.0_f64, |s, z| s.max(z.norm()));
    if scale == 0.0 {
        return Ok(RationalApproximant::zero());
    }
    let mut n = n;
    loop {
        let b = if n == 0 {
            Some(vec![Complex64::new(1.0, 0.0)])
        } else {
            denominator(c, m, n)?
        };
        if let Some(b) = b {
            let bmax = b.iter().fold(0.0_f64, |s, z| s.max(z.norm()));
            if b[0].norm() > 1e-10 * bmax {
                let b0 = b[0];
                let mut den: Vec<Complex64> = b.iter().map(|z| z / b0).collect();
                let mut num: Vec<Complex64> = (0..=m)
                    .map(|i| (0..=i.min(n)).map(|j| c[i - j] * den[j]).sum())
                    .collect();
                let trim = |v: &mut Vec<Complex64>, tol: f64| {
                    while v.len() > 1 && v.last().is_some_and(|z| z.norm() <= tol) {
                        v.pop();
                    }
                };
                let dmax = den.iter().fold(0.0_f64, |s, z| s.max(z.norm()));
                trim(&mut den, RANK_TOL * dmax);
                trim(&mut num, RANK_TOL * scale * dmax);
                return Ok(RationalApproximant { num, den });
            }
        }
        if n == 0 {
            return Err(BplError::DegenerateFit);
        }
        n -= 1;
    }
}
