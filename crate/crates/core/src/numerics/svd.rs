use super::{Matrix, NumericsError, Result};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(sigma) V^T`.
///
/// For an `m x n` input, `k = min(m, n)`; `u` is `m x k`, `v` is `n x k`, both with orthonormal
/// columns, and `sigma` is sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for j in 0..self.sigma.len() {
            for i in 0..us.rows() {
                us[(i, j)] *= self.sigma[j];
            }
        }
        us.matmul(&self.v.transpose())
    }
}

/// One-sided Jacobi SVD for matrices with at most 64 rows and columns.
pub fn svd_small(a: &Matrix) -> Result<Svd> {
    if a.rows() > 64 || a.cols() > 64 {
        return Err(NumericsError::InvalidArgument(format!(
            "svd_small supports at most 64x64, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() < a.cols() {
        let t = svd_tall(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    svd_tall(a)
}

fn svd_tall(a: &Matrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    // work column-major: w[j] is column j of A V
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let tol = f64::EPSILON * m as f64;
    // columns this small are numerically zero; rotating them only churns on subnormals
    let fro2: f64 = w.iter().flatten().map(|x| x * x).sum();
    let negligible = (1e-2 * f64::EPSILON) * (1e-2 * f64::EPSILON) * fro2;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|x| x * x).sum();
                let beta: f64 = w[q].iter().map(|x| x * x).sum();
                let gamma: f64 = w[p].iter().zip(&w[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0
                    || alpha.min(beta) <= negligible
                    || gamma.abs() <= tol * alpha.sqrt() * beta.sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = w.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
                let (lo, hi) = v.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(NumericsError::NoConvergence(MAX_SWEEPS));
    }
    let norms: Vec<f64> = w.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma_max = norms.iter().copied().fold(0.0, f64::max);
    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        for k in 0..n {
            vm[(k, dst)] = v[src][k];
        }
        if s > sigma_max * 1e-15 * (m.max(n) as f64) && s > 0.0 {
            for i in 0..m {
                u[(i, dst)] = w[src][i] / s;
            }
        } else {
            deficient.push(dst);
        }
    }
    // complete U with an orthonormal basis for rank-deficient columns
    let mut filled: Vec<usize> = (0..n).filter(|j| !deficient.contains(j)).collect();
    for &col in &deficient {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for e in 0..m {
            let mut cand: Vec<f64> = (0..m).map(|i| if i == e { 1.0 } else { 0.0 }).collect();
            for _ in 0..2 {
                for &j in &filled {
                    let dot: f64 = (0..m).map(|i| u[(i, j)] * cand[i]).sum();
                    for (i, c) in cand.iter_mut().enumerate() {
                        *c -= dot * u[(i, j)];
                    }
                }
            }
            let norm = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, cand));
            }
        }
        if let Some((norm, cand)) = best.filter(|(norm, _)| *norm > 1e-8) {
            for i in 0..m {
                u[(i, col)] = cand[i] / norm;
            }
            filled.push(col);
        }
    }
    Ok(Svd { u, sigma, v: vm })
}
