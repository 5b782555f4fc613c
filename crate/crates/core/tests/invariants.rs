use horizon::bpl::{laplace_eval, pade_fit, RationalApproximant, TaylorGenerator};
use horizon::hamiltonian::{symplecticity_defect, HamiltonianSystem};
use horizon::harness::RunRecord;
use horizon::integrators::{EulerVariant, Integrator};
use horizon::numerics::{fd_jacobian, gauss_laguerre};
use horizon::problems::{HarmonicOscillator, KdvSpectral, NBody, TodaLattice};
use num_complex::Complex64;
use proptest::prelude::*;

fn toda_state() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn toda_gradient_matches_differences(u in toda_state()) {
        let (toda, _) = TodaLattice::benchmark();
        let g = toda.gradient(&u);
        let jac = fd_jacobian(|x| vec![toda.energy(x)], &u, 1e-6).unwrap();
        for i in 0..u.len() {
            prop_assert!((g[i] - jac[(0, i)]).abs() <= 1e-6 * (1.0 + g[i].abs()), "component {i}");
        }
    }

    #[test]
    fn symplectic_schemes_preserve_the_form(u in toda_state(), dt in 0.01..0.2f64) {
        let (toda, _) = TodaLattice::benchmark();
        for scheme in [
            Integrator::SymplecticEuler(EulerVariant::A),
            Integrator::SymplecticEuler(EulerVariant::B),
            Integrator::Verlet,
            Integrator::rk4sym(),
        ] {
            let d = symplecticity_defect(|x| scheme.step(&toda, x, dt).map(|r| r.state), &u).unwrap();
            prop_assert!(d <= 1e-6, "{scheme:?}: {d:e}");
        }
    }

    #[test]
    fn rk4sym_keeps_quadratic_invariants(q in -2.0..2.0f64, p in -2.0..2.0f64, dt in 0.01..0.5f64) {
        let osc = HarmonicOscillator::default();
        let u = vec![q, p];
        let next = Integrator::rk4sym().advance(&osc, &u, dt, 20).unwrap();
        prop_assert!((osc.energy(&next) - osc.energy(&u)).abs() <= 1e-12 * (1.0 + osc.energy(&u)));
    }

    #[test]
    fn kdv_recurrence_keeps_conjugate_symmetry(
        seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8),
        mean in -1.0..1.0f64,
    ) {
        let kdv = KdvSpectral::benchmark(8).unwrap();
        let n = kdv.modes();
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        for (i, (re, im)) in seed.iter().enumerate() {
            u[i] = Complex64::new(*re, *im) * 0.1;
            u[n - 1 - i] = u[i].conj();
        }
        u[n / 2] = Complex64::new(mean * 0.1, 0.0);
        let mut prefix = vec![u];
        for _ in 0..6 {
            let next = kdv.next_coefficient(&prefix, 0.0);
            prefix.push(next);
        }
        for c in &prefix {
            let scale = c.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
            prop_assert!(kdv.symmetry_defect(c) <= 1e-13 * scale);
        }
    }

    #[test]
    fn csv_round_trip_is_exact(rows in prop::collection::vec(prop::collection::vec(-1e6..1e6f64, 7), 1..10)) {
        let mut r = RunRecord::new("toda".into(), "rk4".into(), 2, &["H_err".into(), "H".into()]);
        for row in &rows {
            r.push(row.clone());
        }
        let back = RunRecord::from_csv(&r.to_csv()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn pade_recovers_simple_pole(a in 0.2..2.0f64) {
        // Borel transform of Σ aⁿ tⁿ⁺¹ n! is 1/(1 - aξ)
        let coeffs: Vec<Complex64> = (0..10).map(|n| Complex64::new(a.powi(n), 0.0)).collect();
        let p = pade_fit(&coeffs, 4, 5).unwrap();
        let near = p.poles().iter().map(|z| (z - 1.0 / a).norm()).fold(f64::INFINITY, f64::min);
        prop_assert!(near <= 1e-6 / a, "pole off by {near:e}");
    }

    #[test]
    fn zero_approximant_sums_to_initial_value(u0 in -10.0..10.0f64, t in 0.01..5.0f64) {
        let rule = gauss_laguerre(20).unwrap();
        let z = Complex64::new(u0, 0.0);
        prop_assert_eq!(laplace_eval(&RationalApproximant::zero(), z, t, &rule).unwrap(), z);
    }
}

#[test]
fn figure_eight_momenta_stay_fixed_under_rk4sym() {
    let (body, u) = NBody::figure_eight();
    let dt = 0.01 * horizon::problems::FIGURE_EIGHT_PERIOD;
    let end = Integrator::rk4sym().advance(&body, &u, dt, 200).unwrap();
    let [px, py] = body.linear_momentum(&end);
    assert!(px.abs() < 1e-12 && py.abs() < 1e-12);
    assert!((body.angular_momentum(&end) - body.angular_momentum(&u)).abs() < 1e-12);
}
