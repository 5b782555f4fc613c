use num_complex::Complex64;

use super::{Matrix, NumericsError, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix: ascending eigenvalues and the matching
/// orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Ascending eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    sym_eigen(a).map(|e| e.values)
}

/// Cyclic Jacobi eigen-decomposition. Sweeps until the off-diagonal Frobenius norm drops below
/// `1e-13 * ||A||_F`.
pub fn sym_eigen(a: &Matrix) -> Result<SymEigen> {
    if !a.is_square() {
        return Err(NumericsError::DimensionMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let asym = a.asymmetry();
    if asym > 1e-12 {
        return Err(NumericsError::NotSymmetric(asym));
    }
    let n = a.rows();
    let mut m = a.clone();
    // symmetrise exactly so rotations act on a truly symmetric array
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let mut v = Matrix::identity(n);
    let target = 1e-13 * a.frobenius_norm();
    let off = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut converged = off(&m) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(NumericsError::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        converged = off(&m) <= target;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues of a complex upper Hessenberg matrix (row-major, `n * n` entries) by the
/// single-shift QR algorithm with Wilkinson shifts.
pub fn complex_hessenberg_eigenvalues(h: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    if h.len() != n * n {
        return Err(NumericsError::DimensionMismatch(format!(
            "expected {} entries for a {n}x{n} matrix, got {}",
            n * n,
            h.len()
        )));
    }
    let mut a = h.to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    let mut eig = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eig);
    }
    let max_iter = 60 * n.max(1);
    let mut hi = n - 1;
    let mut iter = 0;
    let mut total = 0;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = a[idx(l, l - 1)].norm();
            let diag = a[idx(l - 1, l - 1)].norm() + a[idx(l, l)].norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                a[idx(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(a[idx(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        total += 1;
        if total > max_iter {
            return Err(NumericsError::NoConvergence(total));
        }
        iter += 1;
        let shift = if iter % 11 == 0 {
            // exceptional shift to break cycles
            a[idx(hi, hi)] + Complex64::new(a[idx(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            let p = a[idx(hi - 1, hi - 1)];
            let q = a[idx(hi - 1, hi)];
            let r = a[idx(hi, hi - 1)];
            let s = a[idx(hi, hi)];
            let half = (p - s) * 0.5;
            let disc = (half * half + q * r).sqrt();
            let mu1 = s - q * r / (half + disc);
            let mu2 = s - q * r / (half - disc);
            let pick = |m: Complex64| if m.is_finite() { m } else { s };
            let (mu1, mu2) = (pick(mu1), pick(mu2));
            if (mu1 - s).norm() <= (mu2 - s).norm() {
                mu1
            } else {
                mu2
            }
        };
        for k in l..=hi {
            a[idx(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - l);
        for k in l..hi {
            let x = a[idx(k, k)];
            let y = a[idx(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (x / r, y / r)
            };
            for j in k..=hi {
                let u = a[idx(k, j)];
                let w = a[idx(k + 1, j)];
                a[idx(k, j)] = c.conj() * u + s.conj() * w;
                a[idx(k + 1, j)] = -s * u + c * w;
            }
            rotations.push((c, s));
        }
        for (offset, (c, s)) in rotations.into_iter().enumerate() {
            let k = l + offset;
            for i in l..=(k + 2).min(hi) {
                let u = a[idx(i, k)];
                let w = a[idx(i, k + 1)];
                a[idx(i, k)] = u * c + w * s;
                a[idx(i, k + 1)] = -u * s.conj() + w * c.conj();
            }
        }
        for k in l..=hi {
            a[idx(k, k)] += shift;
        }
    }
    eig.push(a[idx(0, 0)]);
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det3(a: &Matrix) -> f64 {
        a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
            - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
            + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)])
    }

    #[test]
    fn diagonal_and_swap() {
        let e = sym_eigenvalues(&Matrix::diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e, vec![1.0, 2.0, 3.0]);
        let e = sym_eigenvalues(&Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_and_determinant_identities() {
        let a = Matrix::from_rows(&[
            vec![2.0, -1.0, 0.5],
            vec![-1.0, 3.0, 0.25],
            vec![0.5, 0.25, -4.0],
        ]);
        let e = sym_eigenvalues(&a).unwrap();
        let sum: f64 = e.iter().sum();
        assert!((sum - a.trace()).abs() <= 1e-12 * a.frobenius_norm());
        let prod: f64 = e.iter().product();
        assert!((prod - det3(&a)).abs() <= 1e-10 * det3(&a).abs());
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let a = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.0, 0.3],
            vec![1.0, 3.0, 0.2, 0.0],
            vec![0.0, 0.2, 2.0, 1.0],
            vec![0.3, 0.0, 1.0, 1.0],
        ]);
        let e = sym_eigen(&a).unwrap();
        let vtv = e.vectors.transpose().matmul(&e.vectors);
        assert!(vtv.sub(&Matrix::identity(4)).frobenius_norm() < 1e-13);
        let av = a.matmul(&e.vectors);
        for j in 0..4 {
            for i in 0..4 {
                assert!((av[(i, j)] - e.values[j] * e.vectors[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(sym_eigenvalues(&a), Err(NumericsError::NotSymmetric(_))));
    }

    #[test]
    fn hessenberg_qr_companion() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let c = |re: f64| Complex64::new(re, 0.0);
        let h = vec![c(6.0), c(-11.0), c(6.0), c(1.0), c(0.0), c(0.0), c(0.0), c(1.0), c(0.0)];
        let mut e = complex_hessenberg_eigenvalues(&h, 3).unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - c(want)).norm() < 1e-12);
        }
    }

    #[test]
    fn hessenberg_qr_complex_roots() {
        // x^2 + 1 has roots ±i: companion [[0, -1], [1, 0]]
        let h = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let e = complex_hessenberg_eigenvalues(&h, 2).unwrap();
        assert!(e.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12 && z.re.abs() < 1e-12));
    }
}
