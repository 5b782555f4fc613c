use num_complex::Complex64;

use crate::numerics::QuadratureRule;

use super::{BplError, RationalApproximant, Result};

/// Relative distance to a scaled quadrature node below which a pole invalidates the sum.
const POLE_PROXIMITY: f64 = 1e-3;

fn check_path(poles: &[Complex64], t: f64, rule: &QuadratureRule) -> Result<()> {
    for &z in poles {
        if z.re <= 0.0 {
            continue;
        }
        for x in rule.nodes() {
            let node = t * x;
            if (z - Complex64::new(node, 0.0)).norm_sqr() <= (POLE_PROXIMITY * node).powi(2) {
                return Err(BplError::PoleOnPath { pole: z, t });
            }
        }
    }
    Ok(())
}

/// Borel sum `u_0 + ∫₀^∞ P(ξ) e^{-ξ/t} dξ`, evaluated as `u_0 + t Σ w_k P(t x_k)`.
pub fn laplace_eval(p: &RationalApproximant, u0: Complex64, t: f64, rule: &QuadratureRule) -> Result<Complex64> {
    laplace_eval_with_derivative(p, u0, t, rule).map(|(v, _)| v)
}

/// Borel sum and its time derivative `Σ w_k [P(t x_k) + t x_k P'(t x_k)]`.
pub fn laplace_eval_with_derivative(
    p: &RationalApproximant,
    u0: Complex64,
    t: f64,
    rule: &QuadratureRule,
) -> Result<(Complex64, Complex64)> {
    let poles = if p.den.len() > 1 { p.poles() } else { Vec::new() };
    laplace_with_poles(p, &poles, u0, t, rule)
}

/// [`laplace_eval_with_derivative`] with the denominator roots already known.
pub(crate) fn laplace_with_poles(
    p: &RationalApproximant,
    poles: &[Complex64],
    u0: Complex64,
    t: f64,
    rule: &QuadratureRule,
) -> Result<(Complex64, Complex64)> {
    if !(t > 0.0) {
        return Err(BplError::InvalidConfig(format!(
            "Laplace evaluation needs t > 0, got {t}"
        )));
    }
    if p.is_zero() {
        return Ok((u0, Complex64::new(0.0, 0.0)));
    }
    check_path(poles, t, rule)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        let xi = Complex64::new(t * x, 0.0);
        let (v, dv) = p.eval_with_derivative(xi);
        sum += v * *w;
        dsum += (v + dv * (t * x)) * *w;
    }
    Ok((u0 + sum * t, dsum))
}
