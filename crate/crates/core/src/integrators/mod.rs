//! One-step integrators for canonical Hamiltonian systems.

mod ode;
mod tableau;

pub use ode::{rk4_ode_step, AdaptiveRk4, AdaptiveStep, OdeSystem};
pub use tableau::{check_symplectic_condition, rk4sym_b, ButcherTableau};

use thiserror::Error;

use crate::hamiltonian::HamiltonianSystem;
use crate::numerics::{norm_inf, solve_dense, Matrix, NumericsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegratorError {
    #[error("stage equations did not converge (residual {residual:e} after {iterations} iterations)")]
    StageSolveFailure { iterations: usize, residual: f64 },
    #[error("vector field produced a non-finite value")]
    NonFiniteEvaluation,
    #[error("invalid tableau: {0}")]
    InvalidTableau(String),
    #[error("state has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("step size collapsed below {0:e}")]
    StepCollapse(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, IntegratorError>;

/// Outcome of one step of an integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub state: Vec<f64>,
    /// Stage-solver iterations (zero for explicit updates).
    pub iterations: usize,
    /// Final stage residual (zero for explicit updates).
    pub residual: f64,
}

impl StepReport {
    fn explicit(state: Vec<f64>) -> Self {
        Self {
            state,
            iterations: 0,
            residual: 0.0,
        }
    }
}

/// Tolerances of the implicit stage solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSolver {
    /// Increment tolerance, relative to `max(1, ‖u‖∞)`.
    pub tol: f64,
    pub max_fixed_point: usize,
    pub max_newton: usize,
}

impl Default for StageSolver {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_fixed_point: 100,
            max_newton: 30,
        }
    }
}

impl StageSolver {
    /// Settings for the one-sided updates of the symplectic Euler family.
    pub fn euler_family() -> Self {
        Self {
            tol: 1e-12,
            max_fixed_point: 50,
            max_newton: 30,
        }
    }
}

/// Symplectic Euler variants: `A` evaluates the gradient at `(qⁿ, pⁿ⁺¹)`, `B` at `(qⁿ⁺¹, pⁿ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerVariant {
    A,
    B,
}

fn check_len<S: HamiltonianSystem + ?Sized>(system: &S, u: &[f64]) -> Result<()> {
    let expected = 2 * system.dof();
    if u.len() != expected {
        return Err(IntegratorError::DimensionMismatch {
            expected,
            got: u.len(),
        });
    }
    Ok(())
}

fn finite(v: Vec<f64>) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(IntegratorError::NonFiniteEvaluation)
    }
}

fn axpy(u: &[f64], a: f64, v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(x, y)| x + a * y).collect()
}

/// `uⁿ⁺¹ = uⁿ + Δt J ∇H(uⁿ)`.
pub fn explicit_euler_step<S: HamiltonianSystem + ?Sized>(
    system: &S,
    u: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    check_len(system, u)?;
    finite(axpy(u, dt, &system.vector_field(u)))
}

/// Classical fourth-order Runge-Kutta step.
pub fn rk4_step<S: HamiltonianSystem + ?Sized>(system: &S, u: &[f64], dt: f64) -> Result<Vec<f64>> {
    check_len(system, u)?;
    let f1 = system.vector_field(u);
    let f2 = system.vector_field(&axpy(u, dt / 2.0, &f1));
    let f3 = system.vector_field(&axpy(u, dt / 2.0, &f2));
    let f4 = system.vector_field(&axpy(u, dt, &f3));
    let next = (0..u.len())
        .map(|i| u[i] + dt * (f1[i] + 2.0 * f2[i] + 2.0 * f3[i] + f4[i]) / 6.0)
        .collect();
    finite(next)
}

/// Symplectic Euler step with the default solver settings.
pub fn symplectic_euler_step<S: HamiltonianSystem + ?Sized>(
    system: &S,
    u: &[f64],
    dt: f64,
    variant: EulerVariant,
) -> Result<StepReport> {
    symplectic_euler_step_with(system, u, dt, variant, &StageSolver::euler_family())
}

pub fn symplectic_euler_step_with<S: HamiltonianSystem + ?Sized>(
    system: &S,
    u: &[f64],
    dt: f64,
    variant: EulerVariant,
    solver: &StageSolver,
) -> Result<StepReport> {
    check_len(system, u)?;
    let d = system.dof();
    let (q, p) = u.split_at(d);
    if system.is_separable() {
        let next = match variant {
            EulerVariant::A => {
                let g = system.gradient(u);
                let p1 = axpy(p, -dt, &g[..d]);
                let mid: Vec<f64> = q.iter().chain(&p1).copied().collect();
                let g1 = system.gradient(&mid);
                let mut next = axpy(q, dt, &g1[d..]);
                next.extend(p1);
                next
            }
            EulerVariant::B => {
                let g = system.gradient(u);
                let q1 = axpy(q, dt, &g[d..]);
                let mid: Vec<f64> = q1.iter().chain(p).copied().collect();
                let g1 = system.gradient(&mid);
                let p1 = axpy(p, -dt, &g1[..d]);
                let mut next = q1;
                next.extend(p1);
                next
            }
        };
        return Ok(StepReport::explicit(finite(next)?));
    }

    // Implicit half: unknown block `x` is p¹ (variant A) or q¹ (variant B).
    let assemble = |x: &[f64]| -> Vec<f64> {
        match variant {
            EulerVariant::A => q.iter().chain(x).copied().collect(),
            EulerVariant::B => x.iter().chain(p).copied().collect(),
        }
    };
    let map = |x: &[f64]| -> Vec<f64> {
        let g = system.gradient(&assemble(x));
        match variant {
            EulerVariant::A => axpy(p, -dt, &g[..d]),
            EulerVariant::B => axpy(q, dt, &g[d..]),
        }
    };
    let start = match variant {
        EulerVariant::A => p.to_vec(),
        EulerVariant::B => q.to_vec(),
    };
    let scale = norm_inf(u).max(1.0);
    let tol = solver.tol * scale;
    let solve = fixed_point(&map, start.clone(), tol, solver.max_fixed_point);
    let (x, iterations, residual) = match solve {
        Some(done) => done,
        None => {
            // Newton on G(x) = x - map(x) with Jacobian from the Hessian block
            let jac = |x: &[f64]| -> Result<Matrix> {
                let h = system.hessian(&assemble(x))?;
                let mut m = Matrix::identity(d);
                for i in 0..d {
                    for j in 0..d {
                        m[(i, j)] += match variant {
                            EulerVariant::A => dt * h[(i, d + j)],
                            EulerVariant::B => -dt * h[(d + i, j)],
                        };
                    }
                }
                Ok(m)
            };
            newton(&map, &jac, start, tol, solver.max_newton)?
        }
    };
    let g = system.gradient(&assemble(&x));
    let next = match variant {
        EulerVariant::A => {
            let mut next = axpy(q, dt, &g[d..]);
            next.extend(x);
            next
        }
        EulerVariant::B => {
            let p1 = axpy(p, -dt, &g[..d]);
            let mut next = x;
            next.extend(p1);
            next
        }
    };
    Ok(StepReport {
        state: finite(next)?,
        iterations,
        residual,
    })
}

/// Iterates `x <- map(x)` until the increment drops below `tol`. Gives up early when the
/// increments stop shrinking.
fn fixed_point<F>(map: &F, mut x: Vec<f64>, tol: f64, max_iter: usize) -> Option<(Vec<f64>, usize, f64)>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut last = f64::INFINITY;
    let mut growth = 0;
    for it in 1..=max_iter {
        let next = map(&x);
        let inc = next
            .iter()
            .zip(&x)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        if !inc.is_finite() {
            return None;
        }
        x = next;
        if inc <= tol {
            return Some((x, it, inc));
        }
        if inc >= last {
            growth += 1;
            if growth >= 3 {
                return None;
            }
        }
        last = inc;
    }
    None
}

fn newton<F, J>(map: &F, jac: &J, mut x: Vec<f64>, tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize, f64)>
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> Result<Matrix>,
{
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let g: Vec<f64> = x.iter().zip(map(&x)).map(|(a, b)| a - b).collect();
        residual = norm_inf(&g);
        if !residual.is_finite() {
            break;
        }
        let delta = solve_dense(&jac(&x)?, &g)?;
        for (xi, di) in x.iter_mut().zip(&delta) {
            *xi -= di;
        }
        let step = norm_inf(&delta);
        if step <= tol {
            return Ok((x, it, step));
        }
    }
    Err(IntegratorError::StageSolveFailure {
        iterations: max_iter,
        residual,
    })
}

/// Störmer-Verlet: variant A over `Δt/2` followed by variant B over `Δt/2`.
pub fn stormer_verlet_step<S: HamiltonianSystem + ?Sized>(
    system: &S,
    u: &[f64],
    dt: f64,
) -> Result<StepReport> {
    let half = symplectic_euler_step(system, u, dt / 2.0, EulerVariant::A)?;
    let full = symplectic_euler_step(system, &half.state, dt / 2.0, EulerVariant::B)?;
    Ok(StepReport {
        state: full.state,
        iterations: half.iterations + full.iterations,
        residual: half.residual.max(full.residual),
    })
}

/// Runge-Kutta step for the tableau `tab`, default solver settings.
pub fn irk_step<S: HamiltonianSystem + ?Sized>(
    system: &S,
    u: &[f64],
    dt: f64,
    tab: &ButcherTableau,
) -> Result<StepReport> {
    irk_step_with(system, u, dt, tab, &StageSolver::default())
}

/// Runge-Kutta step `uⁿ⁺¹ = uⁿ + Δt Σ β_i J∇H(U_i)`, `U_i = uⁿ + Δt Σ α_ij J∇H(U_j)`.
///
/// Implicit stages are solved for the increments `Z_i = U_i - uⁿ` by fixed-point iteration,
/// falling back to Newton when the iteration stalls.
pub fn irk_step_with<S: HamiltonianSystem + ?Sized>(
    system: &S,
    u: &[f64],
    dt: f64,
    tab: &ButcherTableau,
    solver: &StageSolver,
) -> Result<StepReport> {
    check_len(system, u)?;
    let s = tab.stages();
    let n = u.len();
    let a = tab.alpha();

    if tab.is_explicit() {
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(s);
        for i in 0..s {
            let mut stage = u.to_vec();
            for (j, kj) in k.iter().enumerate() {
                let c = dt * a[(i, j)];
                if c != 0.0 {
                    for (x, y) in stage.iter_mut().zip(kj) {
                        *x += c * y;
                    }
                }
            }
            k.push(system.vector_field(&stage));
        }
        let mut next = u.to_vec();
        for (b, ki) in tab.beta().iter().zip(&k) {
            for (x, y) in next.iter_mut().zip(ki) {
                *x += dt * b * y;
            }
        }
        return Ok(StepReport::explicit(finite(next)?));
    }

    let stage_fields = |z: &[f64]| -> Vec<Vec<f64>> {
        (0..s)
            .map(|j| {
                let stage: Vec<f64> = u.iter().zip(&z[j * n..(j + 1) * n]).map(|(x, y)| x + y).collect();
                system.vector_field(&stage)
            })
            .collect()
    };
    let map = |z: &[f64]| -> Vec<f64> {
        let f = stage_fields(z);
        let mut out = vec![0.0; s * n];
        for i in 0..s {
            for (j, fj) in f.iter().enumerate() {
                let c = dt * a[(i, j)];
                if c != 0.0 {
                    for (o, y) in out[i * n..(i + 1) * n].iter_mut().zip(fj) {
                        *o += c * y;
                    }
                }
            }
        }
        out
    };
    let tol = solver.tol * norm_inf(u).max(1.0);
    let start = vec![0.0; s * n];
    let (z, iterations, residual) = match fixed_point(&map, start.clone(), tol, solver.max_fixed_point) {
        Some(done) => done,
        None => {
            let j = crate::hamiltonian::canonical_j(n / 2);
            let jac = |z: &[f64]| -> Result<Matrix> {
                let mut m = Matrix::identity(s * n);
                for jdx in 0..s {
                    let stage: Vec<f64> =
                        u.iter().zip(&z[jdx * n..(jdx + 1) * n]).map(|(x, y)| x + y).collect();
                    let df = j.matmul(&system.hessian(&stage)?);
                    for i in 0..s {
                        let c = dt * a[(i, jdx)];
                        if c == 0.0 {
                            continue;
                        }
                        for r in 0..n {
                            for col in 0..n {
                                m[(i * n + r, jdx * n + col)] -= c * df[(r, col)];
                            }
                        }
                    }
                }
                Ok(m)
            };
            newton(&map, &jac, start, tol, solver.max_newton)?
        }
    };
    let f = stage_fields(&z);
    let mut next = u.to_vec();
    for (b, fi) in tab.beta().iter().zip(&f) {
        for (x, y) in next.iter_mut().zip(fi) {
            *x += dt * b * y;
        }
    }
    Ok(StepReport {
        state: finite(next)?,
        iterations,
        residual,
    })
}

/// Fixed-step integrators selectable at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum Integrator {
    Euler,
    ImplicitEuler,
    SymplecticEuler(EulerVariant),
    Verlet,
    Rk4,
    Irk(ButcherTableau),
}

impl Integrator {
    pub fn rk4sym() -> Self {
        Integrator::Irk(ButcherTableau::rk4sym())
    }

    pub fn name(&self) -> String {
        match self {
            Integrator::Euler => "euler".into(),
            Integrator::ImplicitEuler => "ieuler".into(),
            Integrator::SymplecticEuler(EulerVariant::A) => "sympeuler_a".into(),
            Integrator::SymplecticEuler(EulerVariant::B) => "sympeuler_b".into(),
            Integrator::Verlet => "verlet".into(),
            Integrator::Rk4 => "rk4".into(),
            Integrator::Irk(t) => t.name().to_string(),
        }
    }

    /// Advertised order of convergence.
    pub fn order(&self) -> u32 {
        match self {
            Integrator::Euler | Integrator::ImplicitEuler | Integrator::SymplecticEuler(_) => 1,
            Integrator::Verlet => 2,
            Integrator::Rk4 => 4,
            Integrator::Irk(t) => t.order(),
        }
    }

    pub fn step<S: HamiltonianSystem + ?Sized>(&self, system: &S, u: &[f64], dt: f64) -> Result<StepReport> {
        match self {
            Integrator::Euler => explicit_euler_step(system, u, dt).map(StepReport::explicit),
            Integrator::ImplicitEuler => irk_step(system, u, dt, &ButcherTableau::implicit_euler()),
            Integrator::SymplecticEuler(v) => symplectic_euler_step(system, u, dt, *v),
            Integrator::Verlet => stormer_verlet_step(system, u, dt),
            Integrator::Rk4 => rk4_step(system, u, dt).map(StepReport::explicit),
            Integrator::Irk(t) => irk_step(system, u, dt, t),
        }
    }

    /// Takes `steps` steps of size `dt`, returning the final state.
    pub fn advance<S: HamiltonianSystem + ?Sized>(
        &self,
        system: &S,
        u: &[f64],
        dt: f64,
        steps: usize,
    ) -> Result<Vec<f64>> {
        let mut state = u.to_vec();
        for _ in 0..steps {
            state = self.step(system, &state, dt)?.state;
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::symplecticity_defect;

    struct Oscillator;

    impl HamiltonianSystem for Oscillator {
        fn dof(&self) -> usize {
            1
        }
        fn energy(&self, u: &[f64]) -> f64 {
            0.5 * (u[0] * u[0] + u[1] * u[1])
        }
        fn gradient(&self, u: &[f64]) -> Vec<f64> {
            vec![u[0], u[1]]
        }
        fn is_separable(&self) -> bool {
            true
        }
    }

    /// Same Hamiltonian, without the separability hint, so the implicit solvers run.
    struct OpaqueOscillator;

    impl HamiltonianSystem for OpaqueOscillator {
        fn dof(&self) -> usize {
            1
        }
        fn energy(&self, u: &[f64]) -> f64 {
            Oscillator.energy(u)
        }
        fn gradient(&self, u: &[f64]) -> Vec<f64> {
            Oscillator.gradient(u)
        }
    }

    /// `H = (q² + 1)(p² + 1) / 2`: not separable, so every implicit path is exercised.
    struct Coupled;

    impl HamiltonianSystem for Coupled {
        fn dof(&self) -> usize {
            1
        }
        fn energy(&self, u: &[f64]) -> f64 {
            0.5 * (u[0] * u[0] + 1.0) * (u[1] * u[1] + 1.0)
        }
        fn gradient(&self, u: &[f64]) -> Vec<f64> {
            vec![u[0] * (u[1] * u[1] + 1.0), u[1] * (u[0] * u[0] + 1.0)]
        }
    }

    struct Still;

    impl HamiltonianSystem for Still {
        fn dof(&self) -> usize {
            1
        }
        fn energy(&self, _: &[f64]) -> f64 {
            1.0
        }
        fn gradient(&self, _: &[f64]) -> Vec<f64> {
            vec![0.0, 0.0]
        }
    }

    fn rotation(u: &[f64], t: f64) -> Vec<f64> {
        let (c, s) = (t.cos(), t.sin());
        vec![c * u[0] + s * u[1], -s * u[0] + c * u[1]]
    }

    #[test]
    fn explicit_euler_hand_value() {
        let next = explicit_euler_step(&Oscillator, &[1.0, 0.0], 0.1).unwrap();
        assert_eq!(next, vec![1.0, -0.1]);
        assert_eq!(explicit_euler_step(&Oscillator, &[0.4, 0.2], 0.0).unwrap(), vec![0.4, 0.2]);
        assert_eq!(explicit_euler_step(&Still, &[0.4, 0.2], 0.3).unwrap(), vec![0.4, 0.2]);
    }

    #[test]
    fn symplectic_euler_hand_value() {
        let r = symplectic_euler_step(&Oscillator, &[1.0, 0.0], 0.1, EulerVariant::A).unwrap();
        assert!((r.state[1] + 0.1).abs() < 1e-15);
        assert!((r.state[0] - 0.99).abs() < 1e-15);
        assert_eq!(r.iterations, 0);
        let r = symplectic_euler_step(&Still, &[0.3, 0.2], 0.1, EulerVariant::B).unwrap();
        assert_eq!(r.state, vec![0.3, 0.2]);
    }

    #[test]
    fn implicit_euler_family_matches_explicit_for_separable() {
        for v in [EulerVariant::A, EulerVariant::B] {
            let a = symplectic_euler_step(&Oscillator, &[0.3, 0.7], 0.1, v).unwrap();
            let b = symplectic_euler_step(&OpaqueOscillator, &[0.3, 0.7], 0.1, v).unwrap();
            assert!(b.iterations > 0);
            for (x, y) in a.state.iter().zip(&b.state) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symplectic_euler_defects() {
        for v in [EulerVariant::A, EulerVariant::B] {
            let d = symplecticity_defect(
                |x| symplectic_euler_step(&Oscillator, x, 0.1, v).map(|r| r.state),
                &[0.3, 0.7],
            )
            .unwrap();
            assert!(d <= 1e-7, "{d}");
            let d = symplecticity_defect(
                |x| symplectic_euler_step(&Coupled, x, 0.1, v).map(|r| r.state),
                &[0.3, 0.7],
            )
            .unwrap();
            assert!(d <= 1e-6, "{d}");
        }
    }

    #[test]
    fn verlet_is_composition_and_reversible() {
        let u = [1.0, 0.0];
        let v = stormer_verlet_step(&Oscillator, &u, 0.1).unwrap().state;
        let half = symplectic_euler_step(&Oscillator, &u, 0.05, EulerVariant::A).unwrap();
        let comp = symplectic_euler_step(&Oscillator, &half.state, 0.05, EulerVariant::B).unwrap();
        assert_eq!(v, comp.state);
        for sys in [&Coupled as &dyn HamiltonianSystem, &Oscillator] {
            let fwd = stormer_verlet_step(sys, &[0.3, -0.4], 0.1).unwrap().state;
            let back = stormer_verlet_step(sys, &fwd, -0.1).unwrap().state;
            assert!((back[0] - 0.3).abs() < 1e-12 && (back[1] + 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_local_error_on_rotation() {
        let u = [0.6, -0.8];
        for dt in [0.1, 0.2, 0.4] {
            let got = rk4_step(&Oscillator, &u, dt).unwrap();
            let exact = rotation(&u, dt);
            let err = ((got[0] - exact[0]).powi(2) + (got[1] - exact[1]).powi(2)).sqrt();
            assert!(err <= dt.powi(5) / 120.0 * 1.1, "dt={dt} err={err}");
        }
        assert_eq!(rk4_step(&Still, &[0.1, 0.2], 0.5).unwrap(), vec![0.1, 0.2]);
    }

    #[test]
    fn explicit_tableau_reproduces_rk4() {
        let tab = ButcherTableau::classical_rk4();
        let u = [0.3, 0.9];
        let a = irk_step(&Coupled, &u, 0.1, &tab).unwrap();
        let b = rk4_step(&Coupled, &u, 0.1).unwrap();
        assert_eq!(a.iterations, 0);
        for (x, y) in a.state.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-15 * y.abs().max(1.0));
        }
    }

    #[test]
    fn midpoint_preserves_oscillator_energy() {
        let tab = ButcherTableau::implicit_midpoint();
        let mut u = vec![0.3, 0.9];
        let e0 = Oscillator.energy(&u);
        for _ in 0..100 {
            u = irk_step(&Oscillator, &u, 0.3, &tab).unwrap().state;
        }
        assert!((Oscillator.energy(&u) - e0).abs() < 1e-11, "{}", Oscillator.energy(&u) - e0);
    }

    #[test]
    fn newton_fallback_handles_stiff_stage_equations() {
        // dt * Lipschitz constant > 1: fixed-point diverges, Newton must take over
        let tab = ButcherTableau::implicit_midpoint();
        let r = irk_step(&Oscillator, &[1.0, 0.0], 3.0, &tab).unwrap();
        // midpoint on the oscillator is the Cayley transform
        let (c, s) = ((1.0 - 2.25) / (1.0 + 2.25), 3.0 / (1.0 + 2.25));
        assert!((r.state[0] - c).abs() < 1e-12 && (r.state[1] + s).abs() < 1e-12);
        let r = symplectic_euler_step(&OpaqueOscillator, &[1.0, 0.0], 2.0, EulerVariant::A).unwrap();
        assert!((r.state[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn rk4sym_converges_at_order_four() {
        let tab = ButcherTableau::rk4sym();
        let u = [1.0, 0.0];
        let horizon = 2.0_f64;
        let mut errs = Vec::new();
        let dts = [0.2, 0.1, 0.05];
        for dt in dts {
            let steps = (horizon / dt).round() as usize;
            let got = Integrator::Irk(tab.clone()).advance(&Oscillator, &u, dt, steps).unwrap();
            let exact = rotation(&u, horizon);
            errs.push(((got[0] - exact[0]).powi(2) + (got[1] - exact[1]).powi(2)).sqrt());
        }
        let x: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let slope = crate::numerics::linear_trend(&x, &y);
        assert!((slope - 4.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn off_triple_jump_composition_is_only_second_order() {
        let tab = ButcherTableau::midpoint_composition("c", &[0.4, 0.2, 0.4], 2).unwrap();
        let u = [1.0, 0.0];
        let mut errs = Vec::new();
        let dts = [0.2, 0.1, 0.05];
        for dt in dts {
            let steps = (2.0_f64 / dt).round() as usize;
            let got = Integrator::Irk(tab.clone()).advance(&Oscillator, &u, dt, steps).unwrap();
            let exact = rotation(&u, 2.0);
            errs.push(((got[0] - exact[0]).powi(2) + (got[1] - exact[1]).powi(2)).sqrt());
        }
        let x: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let slope = crate::numerics::linear_trend(&x, &y);
        assert!((slope - 2.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        assert!(matches!(
            rk4_step(&Oscillator, &[1.0, 2.0, 3.0, 4.0], 0.1),
            Err(IntegratorError::DimensionMismatch { expected: 2, got: 4 })
        ));
    }
}
