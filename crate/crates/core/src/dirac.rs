//! Dirac integrators for Lagrangians `L = ½ vᵀ M v - U(q)` with holonomic constraints `φ^a(q) = 0`.
//!
//! One step solves, for the discrete velocity `vⁿ` and multipliers `λ`,
//!
//! ```text
//! pⁿ - M vⁿ - Δt ∇U(qⁿ) = Σ λ_a α_d^a
//! <α_d^a, vⁿ> = 0
//! p^{n+1} = M vⁿ
//! ```
//!
//! with `vⁿ = (q^{n+1} - qⁿ)/Δt` (Dirac-1) or `vⁿ = (q^{n+1} - q^{n-1})/(2Δt)` (Dirac-2).

use thiserror::Error;

use crate::numerics::{default_fd_step, fd_jacobian, norm_inf, solve_dense, sym_eigenvalues, Matrix, NumericsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiracError {
    #[error("constraint gradients are rank deficient (smallest Gram eigenvalue {0:e})")]
    RankDeficientConstraints(f64),
    #[error("step equations not solved after {iterations} Newton iterations (residual {residual:e})")]
    SolveFailure { iterations: usize, residual: f64 },
    #[error("Dirac-2 needs the previous configuration; bootstrap with a Dirac-1 step")]
    MissingHistory,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("time step must be finite and non-negative, got {0}")]
    InvalidStep(f64),
    #[error("non-finite value in the step")]
    NonFinite,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, DiracError>;

/// Lagrangian data of a mechanical system with holonomic constraints.
pub trait ConstrainedSystem {
    /// Configuration dimension `d`.
    fn dim(&self) -> usize;

    /// Number of constraints `m`.
    fn constraint_count(&self) -> usize;

    /// Symmetric positive definite mass matrix.
    fn mass(&self) -> Matrix;

    fn potential(&self, q: &[f64]) -> f64;

    fn grad_potential(&self, q: &[f64]) -> Vec<f64>;

    /// Values `φ^a(q)`.
    fn constraints(&self, q: &[f64]) -> Vec<f64>;

    /// `m × d` matrix whose rows are `∇φ^a(q)`.
    fn constraint_gradients(&self, q: &[f64]) -> Matrix;

    /// Hessian of `φ^a`; central differences of the gradients by default.
    fn constraint_hessian(&self, a: usize, q: &[f64]) -> Result<Matrix> {
        let h = fd_jacobian(|x| self.constraint_gradients(x).row(a).to_vec(), q, default_fd_step(q))?;
        let mut sym = h.clone();
        for i in 0..q.len() {
            for j in 0..q.len() {
                sym[(i, j)] = 0.5 * (h[(i, j)] + h[(j, i)]);
            }
        }
        Ok(sym)
    }

    /// Energy `½ pᵀ M⁻¹ p + U(q)`.
    fn energy(&self, q: &[f64], p: &[f64]) -> Result<f64> {
        let v = solve_dense(&self.mass(), p)?;
        let kinetic: f64 = 0.5 * v.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
        Ok(kinetic + self.potential(q))
    }
}

/// State carried between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// `q^{n-1}`, required by Dirac-2.
    pub prev_q: Option<Vec<f64>>,
    /// Multipliers from the last step.
    pub lambda: Vec<f64>,
}

impl DiracState {
    pub fn new<S: ConstrainedSystem + ?Sized>(sys: &S, q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let d = sys.dim();
        for len in [q.len(), p.len()] {
            if len != d {
                return Err(DiracError::DimensionMismatch { expected: d, got: len });
            }
        }
        Ok(Self {
            q,
            p,
            prev_q: None,
            lambda: vec![0.0; sys.constraint_count()],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiracScheme {
    Dirac1,
    Dirac2,
}

/// Where the discrete constraint one-form `α_d^a` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstraintForm {
    /// `α_d^a = ∇φ^a(qⁿ)`: one linear saddle solve per step, but `φ` drifts by `O(Δt)` over a
    /// fixed horizon.
    Left,
    /// `α_d^a = ∇φ^a` at the midpoint of the stencil. For quadratic constraints
    /// `<α_d^a, vⁿ> = 0` is equivalent to `φ^a(q^{n+1}) = φ^a(q^{n-1 or n})`, so the constraints
    /// hold to round-off.
    #[default]
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracIntegrator {
    pub scheme: DiracScheme,
    pub form: ConstraintForm,
    pub tol: f64,
    pub max_iterations: usize,
}

impl DiracIntegrator {
    pub fn new(scheme: DiracScheme) -> Self {
        Self {
            scheme,
            form: ConstraintForm::default(),
            tol: 1e-13,
            max_iterations: 30,
        }
    }

    pub fn with_form(mut self, form: ConstraintForm) -> Self {
        self.form = form;
        self
    }

    /// One step; Dirac-2 without history fails with [`DiracError::MissingHistory`].
    pub fn step<S: ConstrainedSystem + ?Sized>(&self, sys: &S, st: &DiracState, dt: f64) -> Result<DiracState> {
        check_state(sys, st)?;
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(DiracError::InvalidStep(dt));
        }
        let (base, span) = match self.scheme {
            DiracScheme::Dirac1 => (st.q.clone(), dt),
            DiracScheme::Dirac2 => (st.prev_q.clone().ok_or(DiracError::MissingHistory)?, 2.0 * dt),
        };
        let (v, lambda) = self.solve(sys, st, &base, dt, span)?;
        let q: Vec<f64> = base.iter().zip(&v).map(|(b, vi)| b + span * vi).collect();
        let p = sys.mass().mat_vec(&v);
        if q.iter().chain(&p).chain(&lambda).any(|x| !x.is_finite()) {
            return Err(DiracError::NonFinite);
        }
        Ok(DiracState {
            q,
            p,
            prev_q: Some(st.q.clone()),
            lambda,
        })
    }

    /// Like [`DiracIntegrator::step`], but a Dirac-2 step without history is replaced by Dirac-1.
    pub fn advance<S: ConstrainedSystem + ?Sized>(&self, sys: &S, st: &DiracState, dt: f64) -> Result<DiracState> {
        if self.scheme == DiracScheme::Dirac2 && st.prev_q.is_none() {
            DiracIntegrator { scheme: DiracScheme::Dirac1, ..*self }.step(sys, st, dt)
        } else {
            self.step(sys, st, dt)
        }
    }

    /// Point at which `α_d` is evaluated for a given velocity.
    fn anchor(&self, st_q: &[f64], base: &[f64], v: &[f64], span: f64) -> Vec<f64> {
        match self.form {
            ConstraintForm::Left => st_q.to_vec(),
            ConstraintForm::Midpoint => base.iter().zip(v).map(|(b, vi)| b + 0.5 * span * vi).collect(),
        }
    }

    fn solve<S: ConstrainedSystem + ?Sized>(
        &self,
        sys: &S,
        st: &DiracState,
        base: &[f64],
        dt: f64,
        span: f64,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = sys.dim();
        let m = sys.constraint_count();
        let mass = sys.mass();
        let grad_u = sys.grad_potential(&st.q);
        let rhs: Vec<f64> = st.p.iter().zip(&grad_u).map(|(p, g)| p - dt * g).collect();

        let g0 = sys.constraint_gradients(&st.q);
        check_rank(&g0)?;
        let mut x = saddle_solve(&mass, &g0, &rhs)?;
        if self.form == ConstraintForm::Left || m == 0 {
            return Ok((x[..d].to_vec(), x[d..].to_vec()));
        }

        let scale = 1.0 + norm_inf(&rhs);
        let mut residual = f64::INFINITY;
        for _ in 0..self.max_iterations {
            let (v, lambda) = x.split_at(d);
            let mid = self.anchor(&st.q, base, v, span);
            let g = sys.constraint_gradients(&mid);
            let mut r = mass.mat_vec(v);
            for a in 0..m {
                for i in 0..d {
                    r[i] += lambda[a] * g[(a, i)];
                }
            }
            for i in 0..d {
                r[i] -= rhs[i];
            }
            for a in 0..m {
                r.push(g.row(a).iter().zip(v).map(|(gi, vi)| gi * vi).sum());
            }
            residual = norm_inf(&r);
            if !residual.is_finite() {
                return Err(DiracError::NonFinite);
            }
            if residual <= self.tol * scale {
                return Ok((v.to_vec(), lambda.to_vec()));
            }
            let s = 0.5 * span;
            let mut jac = Matrix::zeros(d + m, d + m);
            for i in 0..d {
                for j in 0..d {
                    jac[(i, j)] = mass[(i, j)];
                }
            }
            for a in 0..m {
                let h = sys.constraint_hessian(a, &mid)?;
                let hv = h.mat_vec(v);
                for i in 0..d {
                    for j in 0..d {
                        jac[(i, j)] += lambda[a] * s * h[(i, j)];
                    }
                    jac[(i, d + a)] = g[(a, i)];
                    jac[(d + a, i)] = g[(a, i)] + s * hv[i];
                }
            }
            let delta = solve_dense(&jac, &r)?;
            for (xi, di) in x.iter_mut().zip(&delta) {
                *xi -= di;
            }
            if norm_inf(&delta) <= f64::EPSILON * (1.0 + norm_inf(&x)) && residual <= 1e3 * self.tol * scale {
                return Ok((x[..d].to_vec(), x[d..].to_vec()));
            }
        }
        Err(DiracError::SolveFailure {
            iterations: self.max_iterations,
            residual,
        })
    }
}

fn check_state<S: ConstrainedSystem + ?Sized>(sys: &S, st: &DiracState) -> Result<()> {
    let d = sys.dim();
    for len in [st.q.len(), st.p.len()] {
        if len != d {
            return Err(DiracError::DimensionMismatch { expected: d, got: len });
        }
    }
    if let Some(prev) = &st.prev_q {
        if prev.len() != d {
            return Err(DiracError::DimensionMismatch { expected: d, got: prev.len() });
        }
    }
    Ok(())
}

fn check_rank(g: &Matrix) -> Result<()> {
    if g.rows() == 0 {
        return Ok(());
    }
    let gram = g.matmul(&g.transpose());
    let min = sym_eigenvalues(&gram)?[0];
    // smallest singular value of G must exceed 1e-10
    if !(min > 1e-20) {
        return Err(DiracError::RankDeficientConstraints(min));
    }
    Ok(())
}

/// Solves `[M Gᵀ; G 0] (v, λ) = (rhs, 0)`.
fn saddle_solve(mass: &Matrix, g: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let d = mass.rows();
    let m = g.rows();
    let mut k = Matrix::zeros(d + m, d + m);
    for i in 0..d {
        for j in 0..d {
            k[(i, j)] = mass[(i, j)];
        }
    }
    for a in 0..m {
        for i in 0..d {
            k[(i, d + a)] = g[(a, i)];
            k[(d + a, i)] = g[(a, i)];
        }
    }
    let mut b = rhs.to_vec();
    b.resize(d + m, 0.0);
    Ok(solve_dense(&k, &b)?)
}

pub fn dirac1_step<S: ConstrainedSystem + ?Sized>(sys: &S, st: &DiracState, dt: f64) -> Result<DiracState> {
    DiracIntegrator::new(DiracScheme::Dirac1).step(sys, st, dt)
}

pub fn dirac2_step<S: ConstrainedSystem + ?Sized>(sys: &S, st: &DiracState, dt: f64) -> Result<DiracState> {
    DiracIntegrator::new(DiracScheme::Dirac2).step(sys, st, dt)
}

/// `max_a |φ^a(q)|`.
pub fn constraint_residual<S: ConstrainedSystem + ?Sized>(sys: &S, st: &DiracState) -> f64 {
    norm_inf(&sys.constraints(&st.q))
}

/// Explicit Euler on `q̇ = M⁻¹p`, `ṗ = -∇U - Gᵀλ` with `λ` from the acceleration-level constraint
/// `G M⁻¹ (-∇U - Gᵀλ) + [vᵀ ∇²φ^a v]_a = 0`.
pub fn euler_constrained_control<S: ConstrainedSystem + ?Sized>(sys: &S, st: &DiracState, dt: f64) -> Result<DiracState> {
    check_state(sys, st)?;
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(DiracError::InvalidStep(dt));
    }
    let d = sys.dim();
    let m = sys.constraint_count();
    let mass = sys.mass();
    let v = solve_dense(&mass, &st.p)?;
    let grad_u = sys.grad_potential(&st.q);
    let g = sys.constraint_gradients(&st.q);
    check_rank(&g)?;

    let mut lambda = vec![0.0; m];
    if m > 0 {
        let mut minv_gt = Matrix::zeros(d, m);
        for a in 0..m {
            let col = solve_dense(&mass, g.row(a))?;
            for i in 0..d {
                minv_gt[(i, a)] = col[i];
            }
        }
        let minv_grad = solve_dense(&mass, &grad_u)?;
        let schur = g.matmul(&minv_gt);
        let mut b = g.mat_vec(&minv_grad);
        for (a, ba) in b.iter_mut().enumerate() {
            let hv = sys.constraint_hessian(a, &st.q)?.mat_vec(&v);
            *ba = -*ba + v.iter().zip(&hv).map(|(x, y)| x * y).sum::<f64>();
        }
        lambda = solve_dense(&schur, &b)?;
    }
    let mut force: Vec<f64> = grad_u.iter().map(|x| -x).collect();
    for a in 0..m {
        for i in 0..d {
            force[i] -= lambda[a] * g[(a, i)];
        }
    }
    let q: Vec<f64> = st.q.iter().zip(&v).map(|(q, v)| q + dt * v).collect();
    let p: Vec<f64> = st.p.iter().zip(&force).map(|(p, f)| p + dt * f).collect();
    if q.iter().chain(&p).any(|x| !x.is_finite()) {
        return Err(DiracError::NonFinite);
    }
    Ok(DiracState {
        q,
        p,
        prev_q: Some(st.q.clone()),
        lambda,
    })
}

/// Residual `max_a |<α_d^a, vⁿ>|` of the discrete velocity constraint for a completed step.
pub fn velocity_constraint_defect<S: ConstrainedSystem + ?Sized>(
    sys: &S,
    scheme: DiracScheme,
    form: ConstraintForm,
    before: &DiracState,
    after: &DiracState,
    dt: f64,
) -> Result<f64> {
    let (base, span) = match scheme {
        DiracScheme::Dirac1 => (before.q.clone(), dt),
        DiracScheme::Dirac2 => (before.prev_q.clone().ok_or(DiracError::MissingHistory)?, 2.0 * dt),
    };
    let v: Vec<f64> = after.q.iter().zip(&base).map(|(a, b)| (a - b) / span).collect();
    let anchor = match form {
        ConstraintForm::Left => before.q.clone(),
        ConstraintForm::Midpoint => base.iter().zip(&after.q).map(|(b, a)| 0.5 * (a + b)).collect(),
    };
    Ok(norm_inf(&sys.constraint_gradients(&anchor).mat_vec(&v)))
}
