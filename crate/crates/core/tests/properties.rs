use proptest::prelude::*;

use qsl_core::dynamics::{bounds, commutator_term, energy_std_dev, evolve, qubit_analytic_bounds, HamiltonianSchedule};
use qsl_core::linalg::{hermitian_eig, hermitian_propagator, psd_sqrt};
use qsl_core::metrics::{bures_angle, phi_angle, root_fidelity, theta_angle, theta_angle_bloch};
use qsl_core::sampling::{random_hamiltonian, random_state_fixed_spectrum, random_state_hs, RngStream};
use qsl_core::state::{from_bloch, iso_spectral, to_bloch};
use qsl_core::{ComplexMatrix, Spectrum};

fn dim() -> impl Strategy<Value = usize> {
    2usize..=6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagator_is_unitary(n in dim(), seed in any::<u64>(), t in -5.0f64..5.0) {
        let h = random_hamiltonian(n, &mut RngStream::new(seed, 0), None).unwrap();
        let u = hermitian_propagator(&h, t).unwrap();
        prop_assert!(u.unitarity_residual() < 1e-10);
    }

    #[test]
    fn eig_reconstructs(n in dim(), seed in any::<u64>()) {
        let h = random_hamiltonian(n, &mut RngStream::new(seed, 1), None).unwrap();
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&h) < 1e-10);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn psd_sqrt_squares_back(n in dim(), seed in any::<u64>()) {
        let rho = random_state_hs(n, &mut RngStream::new(seed, 2)).unwrap();
        let r = psd_sqrt(rho.matrix()).unwrap();
        prop_assert!((&r * &r).max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(n in dim(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 3);
        let a = random_state_hs(n, &mut rng).unwrap();
        let b = random_state_hs(n, &mut rng).unwrap();
        let f = root_fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - root_fidelity(&b, &a).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn bloch_round_trip(n in dim(), seed in any::<u64>()) {
        let rho = random_state_hs(n, &mut RngStream::new(seed, 4)).unwrap();
        let r = to_bloch(&rho);
        prop_assert!(r.norm() <= 1.0 + 1e-12);
        prop_assert!(from_bloch(&r).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-9);
    }

    #[test]
    fn distances_order_and_range(n in dim(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 5);
        let a = random_state_hs(n, &mut rng).unwrap();
        let b = random_state_fixed_spectrum(a.spectrum(), &mut rng).unwrap();
        prop_assert!(iso_spectral(&a, &b, 1e-8).unwrap());
        let theta = theta_angle(&a, &b).unwrap().radians();
        let phi = phi_angle(&a, &b).unwrap().radians();
        let l = bures_angle(&a, &b).unwrap().radians();
        prop_assert!((0.0..=std::f64::consts::PI).contains(&theta));
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&phi));
        prop_assert!((theta - theta_angle_bloch(&a, &b).unwrap().radians()).abs() < 1e-8);
        prop_assert!(l <= std::f64::consts::FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn commutator_term_below_variance(n in dim(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 6);
        let rho = random_state_hs(n, &mut rng).unwrap();
        let h = random_hamiltonian(n, &mut rng, None).unwrap();
        prop_assert!(commutator_term(rho.matrix(), &h).sqrt() <= energy_std_dev(rho.matrix(), &h) + 1e-9);
    }

    #[test]
    fn bounds_never_exceed_time(n in dim(), seed in any::<u64>(), t in 0.05f64..3.0) {
        let mut rng = RngStream::new(seed, 7);
        let rho = random_state_hs(n, &mut rng).unwrap();
        let h = random_hamiltonian(n, &mut rng, Some(1.0)).unwrap();
        let sched = HamiltonianSchedule::constant(h, t).unwrap();
        let path = evolve(&rho, &sched, 17).unwrap();
        let r = bounds(&rho, path.final_state(), &sched, 17).unwrap();
        let (a, b, c) = r.times();
        prop_assert!(a <= t + 1e-6 && b <= t + 1e-6 && c <= t + 1e-6);
    }

    #[test]
    fn evolution_preserves_spectrum(n in dim(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 8);
        let rho = random_state_hs(n, &mut rng).unwrap();
        let h = random_hamiltonian(n, &mut rng, None).unwrap();
        let sched = HamiltonianSchedule::constant(h, 1.3).unwrap();
        let path = evolve(&rho, &sched, 5).unwrap();
        let recomputed = qsl_core::DensityMatrix::new(path.final_state().matrix().clone()).unwrap();
        prop_assert!(recomputed.spectrum().max_deviation(rho.spectrum()) < 1e-10);
    }

    #[test]
    fn qubit_closed_form_hierarchy(theta in 0.0f64..std::f64::consts::FRAC_PI_2, lambda in 0.0f64..1.0) {
        prop_assume!((lambda - 0.5).abs() > 1e-3);
        let b = qubit_analytic_bounds(theta, lambda).unwrap();
        prop_assert!(b.t_theta + 1e-9 >= b.t_phi);
        prop_assert!(b.t_phi + 1e-9 >= b.t_l);
        let m = qubit_analytic_bounds(theta, 1.0 - lambda).unwrap();
        prop_assert!((m.t_phi - b.t_phi).abs() < 1e-9 && (m.t_l - b.t_l).abs() < 1e-9);
    }

    #[test]
    fn spectrum_sorted_and_normalized(raw in proptest::collection::vec(0.01f64..1.0, 2..7)) {
        let total: f64 = raw.iter().sum();
        let s = Spectrum::new(raw.iter().map(|x| x / total).collect()).unwrap();
        prop_assert!(s.values().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((s.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(s.purity() >= 1.0 / s.dim() as f64 - 1e-12);
    }

    #[test]
    fn matrix_json_round_trip(n in dim(), seed in any::<u64>()) {
        let h = random_hamiltonian(n, &mut RngStream::new(seed, 9), None).unwrap();
        let text = serde_json::to_string(&h).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, h);
    }
}
