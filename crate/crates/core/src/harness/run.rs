use std::time::Instant;

use num_complex::Complex64;

use crate::bpl::{BplConfig, BplIntegrator, RealifiedOde, TaylorGenerator};
use crate::dirac::{self, ConstrainedSystem, DiracIntegrator, DiracScheme, DiracState};
use crate::hamiltonian::HamiltonianSystem;
use crate::integrators::{rk4_ode_step, AdaptiveRk4, ButcherTableau, EulerVariant, Integrator, OdeSystem};
use crate::problems::{
    duffing_h2, duffing_i1, DoublePendulum, DuffingProblem, HarmonicOscillator, KdvSpectral, NBody, TodaLattice,
};

use super::scenario::{IntegratorId, ProblemId, Scenario};
use super::{HarnessError, Result, RunRecord};

/// Concrete system behind a [`ProblemId`].
enum Model {
    Toda(TodaLattice),
    Harmonic(HarmonicOscillator),
    NBody(NBody),
    Duffing(DuffingProblem, ProblemId),
    Kdv(KdvSpectral),
    Pendulum(DoublePendulum),
}

/// Hamiltonian vector field seen as an ODE.
struct HamiltonianOde<'a>(&'a dyn HamiltonianSystem);

impl OdeSystem for HamiltonianOde<'_> {
    fn dim(&self) -> usize {
        2 * self.0.dof()
    }

    fn rhs(&self, _: f64, y: &[f64]) -> Vec<f64> {
        self.0.vector_field(y)
    }
}

fn numerical(e: impl std::fmt::Display) -> String {
    e.to_string()
}

impl Model {
    fn build(id: ProblemId) -> Result<(Self, Vec<f64>)> {
        let invalid = |e: crate::problems::ProblemError| HarnessError::Validation(e.to_string());
        Ok(match id {
            ProblemId::Toda => {
                let (sys, u) = TodaLattice::benchmark();
                (Model::Toda(sys), u)
            }
            ProblemId::Harmonic => (Model::Harmonic(HarmonicOscillator::default()), vec![1.0, 0.0]),
            ProblemId::FigureEight => {
                let (sys, u) = NBody::figure_eight();
                (Model::NBody(sys), u)
            }
            ProblemId::FigureEightPerturbed => {
                let (sys, u) = NBody::figure_eight_perturbed().map_err(|e| HarnessError::Validation(e.to_string()))?;
                (Model::NBody(sys), u)
            }
            ProblemId::Duffing1 => (Model::Duffing(DuffingProblem::case1(), id), DuffingProblem::initial().to_vec()),
            ProblemId::Duffing2 => (Model::Duffing(DuffingProblem::case2(), id), DuffingProblem::initial().to_vec()),
            ProblemId::DuffingForced(c) => (
                Model::Duffing(DuffingProblem::forced(c), id),
                DuffingProblem::initial().to_vec(),
            ),
            ProblemId::Kdv(m) => {
                let k = KdvSpectral::benchmark(m).map_err(invalid)?;
                let u = RealifiedOde::<KdvSpectral>::pack(&k.initial());
                (Model::Kdv(k), u)
            }
            ProblemId::DoublePendulum => {
                let p = DoublePendulum::default();
                let st = p.initial_state();
                let u = st.q.iter().chain(&st.p).copied().collect();
                (Model::Pendulum(p), u)
            }
        })
    }

    fn hamiltonian(&self) -> Option<&dyn HamiltonianSystem> {
        match self {
            Model::Toda(s) => Some(s),
            Model::Harmonic(s) => Some(s),
            Model::NBody(s) => Some(s),
            _ => None,
        }
    }

    fn generator(&self) -> Option<&dyn TaylorGenerator> {
        match self {
            Model::Toda(s) => Some(s),
            Model::Harmonic(s) => Some(s),
            Model::Duffing(s, _) => Some(s),
            Model::Kdv(s) => Some(s),
            _ => None,
        }
    }

    fn invariant_names(&self) -> Vec<String> {
        let names: Vec<String> = match self {
            Model::Toda(s) => {
                let mut v = vec!["H_err".to_string(), "H".to_string()];
                v.extend((0..s.particles()).map(|k| format!("lax_{k}")));
                return v;
            }
            Model::Harmonic(_) => vec!["H_err".into(), "H".into()],
            Model::NBody(_) => vec!["H_err".into(), "L_err".into(), "H".into(), "L".into()],
            Model::Duffing(_, ProblemId::Duffing1) => vec!["I1_err".into(), "I1".into()],
            Model::Duffing(_, ProblemId::Duffing2) => vec!["H2_err".into(), "H2".into()],
            Model::Duffing(..) => Vec::new(),
            Model::Kdv(_) => vec!["l2_err".into()],
            Model::Pendulum(_) => vec![
                "constraint_err".into(),
                "E_err".into(),
                "E".into(),
                "theta1".into(),
                "theta2".into(),
            ],
        };
        names
    }

    /// Invariant values; `reference` holds the values at `t = 0` for relative errors.
    fn invariants(&self, t: f64, u: &[f64], reference: Option<&[f64]>) -> Result<Vec<f64>> {
        let rel = |v: f64, idx: usize| match reference {
            Some(r) => (v - r[idx]).abs() / r[idx].abs(),
            None => 0.0,
        };
        let abs = |v: f64, idx: usize| match reference {
            Some(r) => (v - r[idx]).abs(),
            None => 0.0,
        };
        Ok(match self {
            Model::Toda(s) => {
                let h = s.energy(u);
                let mut v = vec![rel(h, 1), h];
                v.extend(s.lax_eigenvalues(u).map_err(|e| HarnessError::Numerical {
                    message: e.to_string(),
                    partial: Box::default(),
                })?);
                v
            }
            Model::Harmonic(s) => {
                let h = s.energy(u);
                vec![rel(h, 1), h]
            }
            Model::NBody(s) => {
                let h = s.energy(u);
                let l = s.angular_momentum(u);
                vec![rel(h, 2), abs(l, 3), h, l]
            }
            Model::Duffing(_, ProblemId::Duffing1) => {
                let i = duffing_i1(u[0], u[1], t);
                vec![rel(i, 1), i]
            }
            Model::Duffing(_, ProblemId::Duffing2) => {
                let h = duffing_h2(u[0], u[1]);
                vec![rel(h, 1), h]
            }
            Model::Duffing(..) => Vec::new(),
            Model::Kdv(k) => vec![k.l2_error(&RealifiedOde::<KdvSpectral>::unpack(u), t)],
            Model::Pendulum(p) => {
                let (q, mom) = u.split_at(4);
                let e = p.energy(q, mom).map_err(|e| HarnessError::Numerical {
                    message: e.to_string(),
                    partial: Box::default(),
                })?;
                let [a, b] = DoublePendulum::angles(q);
                let res = p.constraints(q).iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                vec![res, abs(e, 2), e, a, b]
            }
        })
    }
}

type StepFn<'a> = Box<dyn FnMut(f64, &[f64]) -> std::result::Result<(f64, Vec<f64>, f64), String> + 'a>;

fn fixed_integrator(id: &IntegratorId) -> Result<Option<Integrator>> {
    Ok(Some(match id {
        IntegratorId::Euler => Integrator::Euler,
        IntegratorId::ImplicitEuler => Integrator::ImplicitEuler,
        IntegratorId::SympEulerA => Integrator::SymplecticEuler(EulerVariant::A),
        IntegratorId::SympEulerB => Integrator::SymplecticEuler(EulerVariant::B),
        IntegratorId::Verlet => Integrator::Verlet,
        IntegratorId::Rk4 => Integrator::Rk4,
        IntegratorId::Rk4Sym => Integrator::rk4sym(),
        IntegratorId::Irk(path) => Integrator::Irk(
            ButcherTableau::from_file(path)
                .map_err(|e| HarnessError::Validation(format!("tableau {}: {e}", path.display())))?,
        ),
        _ => return Ok(None),
    }))
}

/// Grid of fixed steps: `n` steps of `dt`, the last one shortened to land on `t_final`.
fn fixed_time(k: usize, dt: f64, t_final: f64) -> f64 {
    let t = k as f64 * dt;
    if t_final - t <= 1e-9 * dt {
        t_final
    } else {
        t
    }
}

fn make_stepper<'a>(s: &Scenario, model: &'a Model) -> Result<StepFn<'a>> {
    let t_final = s.t_final;
    if let Some(integ) = fixed_integrator(&s.integrator)? {
        let dt = s.dt.expect("validated");
        return Ok(match model.hamiltonian() {
            Some(sys) => {
                let mut k = 0usize;
                Box::new(move |t, u| {
                    k += 1;
                    let t1 = fixed_time(k, dt, t_final);
                    let r = integ.step(sys, u, t1 - t).map_err(numerical)?;
                    Ok((t1, r.state, t1 - t))
                })
            }
            None => {
                // only classical RK4 reaches here for non-Hamiltonian problems
                let ode: Box<dyn OdeSystem + 'a> = match model {
                    Model::Duffing(d, _) => Box::new(*d),
                    Model::Kdv(kdv) => Box::new(RealifiedOde(kdv)),
                    _ => unreachable!("validated problem/integrator pairing"),
                };
                let mut k = 0usize;
                Box::new(move |t, u| {
                    k += 1;
                    let t1 = fixed_time(k, dt, t_final);
                    let y = rk4_ode_step(ode.as_ref(), t, u, t1 - t).map_err(numerical)?;
                    Ok((t1, y, t1 - t))
                })
            }
        });
    }
    Ok(match &s.integrator {
        IntegratorId::Rk4Adaptive => {
            let ode: Box<dyn OdeSystem + 'a> = match model {
                Model::Duffing(d, _) => Box::new(*d),
                Model::Kdv(kdv) => Box::new(RealifiedOde(kdv)),
                other => Box::new(HamiltonianOde(other.hamiltonian().expect("validated"))),
            };
            let rk = AdaptiveRk4::new(s.tol.expect("validated"));
            let mut next = rk.initial_step;
            Box::new(move |t, u| {
                let step = rk.step(ode.as_ref(), t, u, next, t_final).map_err(numerical)?;
                next = step.next_step;
                Ok((step.t, step.state, step.step))
            })
        }
        IntegratorId::Bpl => {
            let gen = model.generator().expect("validated");
            let cfg = BplConfig {
                order: s.order,
                pade_num: s.pade_degrees().0,
                pade_den: s.pade_degrees().1,
                quad_nodes: s.quad_nodes,
                eps_res: s.eps_res.expect("validated"),
                ..Default::default()
            };
            let mut bpl = BplIntegrator::new(cfg).map_err(|e| HarnessError::Validation(e.to_string()))?;
            let complex_state = matches!(model, Model::Kdv(_));
            Box::new(move |t, u| {
                let z: Vec<Complex64> = if complex_state {
                    RealifiedOde::<KdvSpectral>::unpack(u)
                } else {
                    crate::bpl::to_complex(u)
                };
                let step = bpl.step(gen, &z, t, t_final).map_err(numerical)?;
                let y = if complex_state {
                    RealifiedOde::<KdvSpectral>::pack(&step.state)
                } else {
                    crate::bpl::real_parts(&step.state)
                };
                Ok((step.t1, y, step.step))
            })
        }
        IntegratorId::Dirac1 | IntegratorId::Dirac2 | IntegratorId::EulerConstrained => {
            let Model::Pendulum(p) = model else {
                unreachable!("validated problem/integrator pairing")
            };
            let dt = s.dt.expect("validated");
            let d = p.dim();
            let mut st: Option<DiracState> = None;
            let which = s.integrator.clone();
            let mut k = 0usize;
            Box::new(move |t, u| {
                let cur = st.get_or_insert_with(|| DiracState {
                    q: u[..d].to_vec(),
                    p: u[d..].to_vec(),
                    prev_q: None,
                    lambda: vec![0.0; p.constraint_count()],
                });
                k += 1;
                let t1 = fixed_time(k, dt, t_final);
                let h = t1 - t;
                let next = match which {
                    IntegratorId::Dirac1 => DiracIntegrator::new(DiracScheme::Dirac1).step(p, cur, h),
                    IntegratorId::Dirac2 => DiracIntegrator::new(DiracScheme::Dirac2).advance(p, cur, h),
                    _ => dirac::euler_constrained_control(p, cur, h),
                }
                .map_err(numerical)?;
                let y = next.q.iter().chain(&next.p).copied().collect();
                *cur = next;
                Ok((t1, y, h))
            })
        }
        _ => unreachable!("fixed-step integrators handled above"),
    })
}

/// Executes a scenario and records samples every `stride` steps plus the final state.
///
/// A numerical failure yields [`HarnessError::Numerical`] carrying the partial record, whose
/// `failure` field is set.
pub fn run_scenario(s: &Scenario) -> Result<RunRecord> {
    s.validate()?;
    let (model, u0) = Model::build(s.problem)?;
    let names = model.invariant_names();
    let mut record = RunRecord::new(s.problem.to_string(), s.integrator.to_string(), u0.len(), &names);
    let fail = |mut record: RunRecord, message: String| {
        record.failure = Some(message.clone());
        HarnessError::Numerical {
            message,
            partial: Box::new(record),
        }
    };
    let reference = match model.invariants(0.0, &u0, None) {
        Ok(v) => v,
        Err(e) => return Err(fail(record, e.to_string())),
    };
    let mut row = vec![0.0];
    row.extend(&u0);
    row.extend(model.invariants(0.0, &u0, Some(&reference))?);
    row.extend([0.0, 0.0]);
    record.push(row);

    let mut stepper = make_stepper(s, &model)?;
    let mut t = 0.0;
    let mut u = u0;
    let mut cpu_ns = 0.0;
    let mut since_sample = 0usize;
    let mut span_start = 0.0;
    while t < s.t_final {
        let clock = Instant::now();
        let result = stepper(t, &u);
        cpu_ns += clock.elapsed().as_nanos() as f64;
        let (t1, u1, _) = match result {
            Ok(v) => v,
            Err(msg) => return Err(fail(record, format!("t = {t}: {msg}"))),
        };
        if !(t1 > t) || u1.iter().any(|x| !x.is_finite()) {
            return Err(fail(record, format!("t = {t}: step produced no progress or a non-finite state")));
        }
        t = t1;
        u = u1;
        since_sample += 1;
        if since_sample == s.stride || t >= s.t_final {
            let inv = match model.invariants(t, &u, Some(&reference)) {
                Ok(v) => v,
                Err(e) => return Err(fail(record, e.to_string())),
            };
            let mut row = vec![t];
            row.extend(&u);
            row.extend(inv);
            row.push((t - span_start) / since_sample as f64);
            row.push(cpu_ns);
            record.push(row);
            since_sample = 0;
            span_start = t;
        }
    }
    Ok(record)
}
