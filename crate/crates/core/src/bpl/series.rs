use num_complex::Complex64;

use super::{BplError, Result};

/// Source of Taylor coefficients for `u' = F(u, t)` on complex vectors.
///
/// Implementations provide the right-hand side and the recurrence `(n+1) u_{n+1} = Fⁿ(u_0..u_n)`
/// where `Fⁿ` is the `n`-th Taylor coefficient of `τ ↦ F(u(t₀+τ), t₀+τ)`.
pub trait TaylorGenerator {
    fn dim(&self) -> usize;

    fn rhs(&self, u: &[Complex64], t: f64) -> Vec<Complex64>;

    /// Returns `u_{n+1}` given `prefix = [u_0, .., u_n]` of the expansion at `t0`.
    fn next_coefficient(&self, prefix: &[Vec<Complex64>], t0: f64) -> Vec<Complex64>;

    /// Hook for problems whose state carries a structural constraint (e.g. conjugate symmetry).
    fn project(&self, _u: &mut [Complex64]) {}
}

/// Truncated power series `Σ_{n ≤ N} u_n (t - t₀)ⁿ` with vector coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    pub t0: f64,
    pub coeffs: Vec<Vec<Complex64>>,
}

impl TaylorSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.first().map_or(0, |c| c.len())
    }

    /// Coefficients of a single state component.
    pub fn component(&self, k: usize) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c[k]).collect()
    }

    /// Direct evaluation of the truncated sum at offset `tau`.
    pub fn eval(&self, tau: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for c in self.coeffs.iter().rev() {
            for (o, a) in out.iter_mut().zip(c) {
                *o = *o * tau + a;
            }
        }
        out
    }
}

pub fn generate_series<G: TaylorGenerator + ?Sized>(
    gen: &G,
    u0: &[Complex64],
    t0: f64,
    order: usize,
) -> Result<TaylorSeries> {
    if order < 1 {
        return Err(BplError::InvalidConfig("series order must be at least 1".into()));
    }
    if u0.len() != gen.dim() {
        return Err(BplError::DimensionMismatch {
            expected: gen.dim(),
            got: u0.len(),
        });
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(u0.to_vec());
    for n in 0..order {
        let next = gen.next_coefficient(&coeffs, t0);
        if next.iter().any(|z| !z.is_finite()) {
            return Err(BplError::NonFiniteCoefficient(n + 1));
        }
        coeffs.push(next);
    }
    Ok(TaylorSeries { t0, coeffs })
}

/// Borel transform: coefficient `n` of the output is `u_{n+1} / n!`, for `n = 0..N-1`.
/// The constant term `u_0` is not part of the transform.
pub fn borel_transform(series: &TaylorSeries) -> TaylorSeries {
    let mut fact = 1.0;
    let coeffs = series
        .coeffs
        .iter()
        .skip(1)
        .enumerate()
        .map(|(n, c)| {
            if n > 0 {
                fact *= n as f64;
            }
            c.iter().map(|z| z / fact).collect()
        })
        .collect();
    TaylorSeries {
        t0: series.t0,
        coeffs,
    }
}

/// Cauchy product coefficient `Σ_{i=0}^{n} a_i b_{n-i}` of scalar series.
pub fn cauchy(a: &[Complex64], b: &[Complex64], n: usize) -> Complex64 {
    (0..=n).map(|i| a[i] * b[n - i]).sum()
}
