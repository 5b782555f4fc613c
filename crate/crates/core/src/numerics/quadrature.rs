use super::{sym_eigenvalues, Matrix, NumericsError, Result};

/// Gauss quadrature rule for `∫₀^∞ f(x) e^{-x} dx ≈ Σ w_k f(x_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_node(&self) -> f64 {
        self.nodes.last().copied().unwrap_or(0.0)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Laguerre polynomials `L_0(x) .. L_{n}(x)` by the three-term recurrence.
fn laguerre_values(n: usize, x: f64) -> Vec<f64> {
    let mut l = Vec::with_capacity(n + 1);
    l.push(1.0);
    if n >= 1 {
        l.push(1.0 - x);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * l[k] - kf * l[k - 1]) / (kf + 1.0);
        l.push(next);
    }
    l
}

/// `n`-point Gauss-Laguerre rule by the Golub-Welsch construction.
///
/// Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix (diagonal `2k+1`,
/// off-diagonal `k`), polished by Newton on `L_n`. The weight of a node is the squared first
/// component of the normalised eigenvector; that eigenvector is `(L_0(x), .., L_{n-1}(x))`, so the
/// component is evaluated from the recurrence instead of being read off the rotated basis,
/// which keeps full relative accuracy in the tiny weights attached to the largest nodes.
pub fn gauss_laguerre(n: usize) -> Result<QuadratureRule> {
    if !(1..=64).contains(&n) {
        return Err(NumericsError::InvalidArgument(format!(
            "Gauss-Laguerre rule size must be in 1..=64, got {n}"
        )));
    }
    let mut jacobi = Matrix::zeros(n, n);
    for k in 0..n {
        jacobi[(k, k)] = 2.0 * k as f64 + 1.0;
        if k + 1 < n {
            jacobi[(k, k + 1)] = (k + 1) as f64;
            jacobi[(k + 1, k)] = (k + 1) as f64;
        }
    }
    let mut nodes = sym_eigenvalues(&jacobi)?;
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let l = laguerre_values(n, *x);
            // n L_n'(x) = x^{-1} * n (L_n - L_{n-1})
            let deriv = n as f64 * (l[n] - l[n - 1]) / *x;
            if deriv == 0.0 || !deriv.is_finite() {
                break;
            }
            let dx = l[n] / deriv;
            *x -= dx;
            if dx.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let l = laguerre_values(n - 1, x);
            1.0 / l.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    Ok(QuadratureRule { nodes, weights })
}
