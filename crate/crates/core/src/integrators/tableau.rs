use std::path::Path;

use crate::numerics::Matrix;

use super::{IntegratorError, Result};

/// Coefficients `(α_ij, β_i)` of an `s`-stage Runge-Kutta scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    name: String,
    alpha: Matrix,
    beta: Vec<f64>,
    order: u32,
}

impl ButcherTableau {
    pub fn new(name: impl Into<String>, alpha: Matrix, beta: Vec<f64>, order: u32) -> Result<Self> {
        let s = beta.len();
        if s == 0 || alpha.rows() != s || alpha.cols() != s {
            return Err(IntegratorError::InvalidTableau(format!(
                "alpha is {}x{} but beta has {} entries",
                alpha.rows(),
                alpha.cols(),
                s
            )));
        }
        if alpha.as_slice().iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(IntegratorError::InvalidTableau("non-finite coefficient".into()));
        }
        let sum: f64 = beta.iter().sum();
        if (sum - 1.0).abs() > 1e-14 {
            return Err(IntegratorError::InvalidTableau(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self {
            name: name.into(),
            alpha,
            beta,
            order,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.beta.len()
    }

    pub fn alpha(&self) -> &Matrix {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// True when `α` is strictly lower triangular, i.e. the stages can be evaluated in turn.
    pub fn is_explicit(&self) -> bool {
        let s = self.stages();
        (0..s).all(|i| (i..s).all(|j| self.alpha[(i, j)] == 0.0))
    }

    /// Classical four-stage explicit scheme.
    pub fn classical_rk4() -> Self {
        let alpha = Matrix::from_rows(&[
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.5, 0.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        let beta = vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
        Self::new("rk4", alpha, beta, 4).expect("classical tableau is consistent")
    }

    pub fn implicit_midpoint() -> Self {
        Self::new("midpoint", Matrix::from_rows(&[vec![0.5]]), vec![1.0], 2)
            .expect("midpoint tableau is consistent")
    }

    pub fn implicit_euler() -> Self {
        Self::new("ieuler", Matrix::from_rows(&[vec![1.0]]), vec![1.0], 1)
            .expect("implicit Euler tableau is consistent")
    }

    /// Composition of implicit midpoint steps of lengths `γ_1 Δt, .., γ_s Δt`, written as one
    /// `s`-stage tableau: `α_ij = γ_j` for `j < i`, `α_ii = γ_i / 2`, `β = γ`.
    ///
    /// Every such tableau satisfies the symplecticity condition. Fourth order needs the
    /// symmetric triple jump `(b, 1 - 2b, b)` with `b = 1 / (2 - 2^{1/3})`.
    pub fn midpoint_composition(name: impl Into<String>, gamma: &[f64], order: u32) -> Result<Self> {
        let s = gamma.len();
        let mut alpha = Matrix::zeros(s, s);
        for i in 0..s {
            for j in 0..i {
                alpha[(i, j)] = gamma[j];
            }
            alpha[(i, i)] = 0.5 * gamma[i];
        }
        Self::new(name, alpha, gamma.to_vec(), order)
    }

    /// Three-stage symplectic scheme of order four.
    pub fn rk4sym() -> Self {
        let b = rk4sym_b();
        Self::midpoint_composition("rk4sym", &[b, 1.0 - 2.0 * b, b], 4)
            .expect("rk4sym tableau is consistent")
    }

    /// Parses a tableau from text: the stage count `s`, then `s` rows of `α`, then the `β` row,
    /// then optionally the advertised order. Blank lines and `#` comments are ignored.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut rows = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let bad = |msg: String| IntegratorError::InvalidTableau(msg);
        let parse_row = |line: &str| -> Result<Vec<f64>> {
            line.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| bad(format!("cannot parse coefficient '{t}'")))
                })
                .collect()
        };
        let s: usize = rows
            .next()
            .ok_or_else(|| bad("empty tableau file".into()))?
            .parse()
            .map_err(|_| bad("first line must be the stage count".into()))?;
        let mut alpha = Matrix::zeros(s, s);
        for i in 0..s {
            let line = rows
                .next()
                .ok_or_else(|| bad(format!("missing alpha row {}", i + 1)))?;
            let row = parse_row(line)?;
            if row.len() != s {
                return Err(bad(format!("alpha row {} has {} entries", i + 1, row.len())));
            }
            for (j, v) in row.into_iter().enumerate() {
                alpha[(i, j)] = v;
            }
        }
        let beta = parse_row(rows.next().ok_or_else(|| bad("missing beta row".into()))?)?;
        if beta.len() != s {
            return Err(bad(format!("beta row has {} entries", beta.len())));
        }
        let order = match rows.next() {
            Some(line) => line
                .parse()
                .map_err(|_| bad(format!("cannot parse order '{line}'")))?,
            None => 1,
        };
        if let Some(extra) = rows.next() {
            return Err(bad(format!("unexpected trailing line '{extra}'")));
        }
        Self::new(name, alpha, beta, order)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| IntegratorError::InvalidTableau(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "irk".into());
        Self::parse(name, &text)
    }

    /// Text form accepted by [`ButcherTableau::parse`].
    pub fn to_text(&self) -> String {
        let s = self.stages();
        let mut out = format!("{s}\n");
        for i in 0..s {
            let row: Vec<String> = (0..s).map(|j| format!("{:e}", self.alpha[(i, j)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        let beta: Vec<String> = self.beta.iter().map(|b| format!("{b:e}")).collect();
        out.push_str(&beta.join(" "));
        out.push('\n');
        out.push_str(&format!("{}\n", self.order));
        out
    }
}

/// Triple-jump coefficient `(2 + 2^{1/3} + 2^{-1/3}) / 3`, equal to `1 / (2 - 2^{1/3})`.
pub fn rk4sym_b() -> f64 {
    let c = 2f64.cbrt();
    (2.0 + c + 1.0 / c) / 3.0
}

/// `max_ij |β_i β_j - β_i α_ij - β_j α_ji|`; zero exactly for symplectic tableaux.
pub fn check_symplectic_condition(tab: &ButcherTableau) -> f64 {
    let s = tab.stages();
    let (a, b) = (tab.alpha(), tab.beta());
    let mut worst = 0.0_f64;
    for i in 0..s {
        for j in 0..s {
            worst = worst.max((b[i] * b[j] - b[i] * a[(i, j)] - b[j] * a[(j, i)]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4sym_coefficients() {
        let t = ButcherTableau::rk4sym();
        let b = rk4sym_b();
        assert!((b - 1.0 / (2.0 - 2f64.cbrt())).abs() < 1e-15);
        assert!((b - 1.3512071919596578).abs() < 1e-15);
        assert_eq!(t.stages(), 3);
        assert_eq!(t.beta().iter().sum::<f64>(), 1.0);
        assert_eq!(t.alpha()[(0, 0)], b / 2.0);
        assert_eq!(t.alpha()[(1, 1)], 0.5 - b);
        assert_eq!(t.alpha()[(2, 1)], 1.0 - 2.0 * b);
        assert!(check_symplectic_condition(&t) <= 1e-15);
    }

    #[test]
    fn symplectic_condition_on_reference_tableaux() {
        assert!(check_symplectic_condition(&ButcherTableau::classical_rk4()) > 0.1);
        assert_eq!(check_symplectic_condition(&ButcherTableau::implicit_midpoint()), 0.0);
        assert!(check_symplectic_condition(&ButcherTableau::implicit_euler()) > 0.5);
        let any = ButcherTableau::midpoint_composition("c", &[0.3, 0.7], 2).unwrap();
        assert!(check_symplectic_condition(&any) < 1e-16);
    }

    #[test]
    fn explicitness() {
        assert!(ButcherTableau::classical_rk4().is_explicit());
        assert!(!ButcherTableau::rk4sym().is_explicit());
    }

    #[test]
    fn rejects_inconsistent_weights() {
        let r = ButcherTableau::new("x", Matrix::zeros(2, 2), vec![0.5, 0.4], 1);
        assert!(matches!(r, Err(IntegratorError::InvalidTableau(_))));
    }

    #[test]
    fn text_round_trip() {
        let t = ButcherTableau::rk4sym();
        let back = ButcherTableau::parse("rk4sym", &t.to_text()).unwrap();
        assert_eq!(back, t);
        let gauss = "# one stage\n1\n0.5\n1.0\n2\n";
        assert_eq!(
            ButcherTableau::parse("midpoint", gauss).unwrap(),
            ButcherTableau::implicit_midpoint()
        );
        assert!(ButcherTableau::parse("x", "2\n0 0\n1\n").is_err());
        assert!(ButcherTableau::parse("x", "1\n0.5\n1\n2\nextra\n").is_err());
    }
}
