//! Acceptance checks, one test per criterion. Every sub-check prints a
//! `PASS`/`FAIL` line (run with `--nocapture` to see them); a test fails if
//! any of its sub-checks does.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use qsl_core::dynamics::{
    bounds, commutator_term, energy_std_dev, evolve, qubit_analytic_bounds, qubit_numeric_bounds,
    qubit_phi_bound_one_minus_k2, speed_samples, HamiltonianSchedule,
};
use qsl_core::experiments::{
    default_qutrit_setup, exp_complexity_bench, exp_purity_correlation, exp_qubit_curves, exp_qutrit_simplex,
    exp_tightness_sweep, hierarchy_holds, least_squares_slope, BenchConfig, ExperimentOptions, VIOLATION_MARGIN,
};
use qsl_core::metrics::{phi_angle, theta_angle, theta_angle_bloch};
use qsl_core::sampling::{
    haar_pure_state, random_hamiltonian, random_state_fixed_spectrum, random_state_hs, RngStream,
};
use qsl_core::state::{from_bloch, to_bloch};
use qsl_core::{DensityMatrix, Spectrum};

struct Checks {
    criterion: u32,
    failed: Vec<String>,
}

impl Checks {
    fn new(criterion: u32) -> Self {
        Self {
            criterion,
            failed: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} :: {name} :: {detail}", self.criterion);
        if !pass {
            self.failed.push(name.to_string());
        }
    }

    fn finish(self) {
        assert!(
            self.failed.is_empty(),
            "criterion {} failed sub-checks: {:?}",
            self.criterion,
            self.failed
        );
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// λ ∈ {0.05, 0.10, …, 0.95} without 1/2.
fn lambda_grid() -> Vec<f64> {
    linspace(0.05, 0.95, 19)
        .into_iter()
        .filter(|l| (l - 0.5).abs() > 1e-12)
        .collect()
}

/// θ ∈ {0.1, …, π/2}.
fn theta_grid() -> Vec<f64> {
    linspace(0.1, FRAC_PI_2, 16)
}

#[test]
fn criterion_1_qubit_attainability() {
    let mut c = Checks::new(1);
    let (lambdas, thetas) = (lambda_grid(), theta_grid());
    let start = Instant::now();
    let (records, summary) = exp_qubit_curves(&lambdas, &thetas, 1, &ExperimentOptions::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    c.check(
        "grid size >= 150",
        records.len() >= 150,
        format!("{} points", records.len()),
    );
    let max_err = summary.max_theta_attainability_error;
    c.check("tTheta = theta", max_err <= 1e-6, format!("max |tTheta - theta| = {max_err:.3e}"));
    let transit = records
        .iter()
        .map(|r| (r.record.actual_t - r.theta).abs().max((r.record.t_theta - r.record.actual_t).abs()))
        .fold(0.0, f64::max);
    c.check(
        "tTheta = exact transit time",
        transit <= 1e-6,
        format!("max |tTheta - T| = {transit:.3e}"),
    );
    c.check("runtime < 10 s", elapsed < 10.0, format!("{elapsed:.2} s"));
    c.finish();
}

#[test]
fn criterion_2_qubit_hierarchy() {
    let mut c = Checks::new(2);
    let (records, summary) =
        exp_qubit_curves(&lambda_grid(), &theta_grid(), 1, &ExperimentOptions::default()).unwrap();
    let broken = records.iter().filter(|r| !hierarchy_holds(&r.record)).count();
    c.check(
        "tTheta >= tPhi >= tL - 1e-9",
        broken == 0,
        format!("{broken} breaches, largest {:.3e}", summary.max_hierarchy_breach),
    );
    c.check(
        "symmetry under lambda -> 1 - lambda",
        summary.max_symmetry_deviation <= 1e-9,
        format!("max deviation {:.3e}", summary.max_symmetry_deviation),
    );

    for lambda in [1e-6, 1.0 - 1e-6] {
        let mut worst = (0.0f64, 0.0f64);
        for &theta in &theta_grid() {
            let r = qubit_numeric_bounds(theta, lambda, 0.0, 257).unwrap();
            let (t_l, t_theta, t_phi) = r.times();
            let spread = t_theta.max(t_phi).max(t_l) - t_theta.min(t_phi).min(t_l);
            if spread > worst.0 {
                worst = (spread, theta);
            }
        }
        c.check(
            &format!("all three coincide at lambda = {lambda}"),
            worst.0 <= 1e-6,
            format!("max spread {:.3e} at theta = {:.4}", worst.0, worst.1),
        );
    }
    c.finish();
}

#[test]
fn criterion_3_analytic_oracle() {
    let mut c = Checks::new(3);
    let (records, summary) =
        exp_qubit_curves(&lambda_grid(), &theta_grid(), 1, &ExperimentOptions::default()).unwrap();
    c.check(
        "closed form matches pipeline to 1e-8",
        summary.max_analytic_deviation <= 1e-8 && records.iter().all(|r| r.agree),
        format!("max deviation {:.3e} over {} points", summary.max_analytic_deviation, records.len()),
    );

    let numeric = qubit_numeric_bounds(FRAC_PI_2, 0.25, 0.0, 257).unwrap();
    let (_, _, t_phi) = numeric.times();
    let plus = qubit_analytic_bounds(FRAC_PI_2, 0.25).unwrap().t_phi;
    let minus = qubit_phi_bound_one_minus_k2(FRAC_PI_2, 0.25);
    c.check(
        "(1 + k^2) form matches at (pi/2, 0.25)",
        (plus - t_phi).abs() <= 1e-8,
        format!("analytic {plus:.7}, numeric {t_phi:.7}"),
    );
    c.check(
        "(1 - k^2) form does not match at (pi/2, 0.25)",
        (minus - t_phi).abs().is_nan() || (minus - t_phi).abs() > 1e-3,
        format!("(1 - k^2) form gives {minus:.7}, numeric {t_phi:.7}"),
    );
    c.finish();
}

#[test]
fn criterion_4_pure_state_reductions() {
    let mut c = Checks::new(4);
    for n in 2..=6usize {
        let mut rng = RngStream::new(4, n as u64);
        let (mut phi_gap, mut theta_gap, mut remark) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..1000 {
            let psi = haar_pure_state(n, &mut rng).unwrap();
            let rho = DensityMatrix::pure(&psi).unwrap();
            let h = random_hamiltonian(n, &mut rng, Some(1.0)).unwrap();
            let sched = HamiltonianSchedule::constant(h, 1.0).unwrap();
            let path = evolve(&rho, &sched, 33).unwrap();
            let r = bounds(&rho, path.final_state(), &sched, 33).unwrap();
            let (t_l, t_theta, t_phi) = r.times();
            phi_gap = phi_gap.max((t_phi - t_l).abs());
            theta_gap = theta_gap.max((t_theta - t_l).abs());
            let d = r.l;
            let nf = n as f64;
            let predicted = ((d.cos().powi(2) - 1.0 / nf) / (1.0 - 1.0 / nf)).clamp(-1.0, 1.0).acos();
            remark = remark.max((r.theta.unwrap() - predicted).abs());
        }
        c.check(
            &format!("N={n} |tPhi - tL| <= 1e-6"),
            phi_gap <= 1e-6,
            format!("max {phi_gap:.3e} over 1000 pairs"),
        );
        if n == 2 {
            c.check(
                "N=2 |tTheta - tL| <= 1e-6",
                theta_gap <= 1e-6,
                format!("max {theta_gap:.3e} over 1000 pairs"),
            );
        } else {
            c.check(
                &format!("N={n} Theta = arccos[(cos^2 d - 1/N)/(1 - 1/N)]"),
                remark <= 1e-8,
                format!("max deviation {remark:.3e}"),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_5_tightness_sweep() {
    let mut c = Checks::new(5);
    let start = Instant::now();
    let (_, summaries) = exp_tightness_sweep(&[3, 4, 5, 6], 10_000, 7, &ExperimentOptions::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    for s in &summaries {
        c.check(
            &format!("N={} violation fraction <= 1%", s.n),
            s.violation_fraction <= 0.01,
            format!("{} / {} = {:.4}", s.violations, s.samples, s.violation_fraction),
        );
        c.check(
            &format!("N={} max relative excess <= 3%", s.n),
            s.max_relative_excess <= 0.03,
            format!("{:.4e}", s.max_relative_excess),
        );
        c.check(
            &format!("N={} pure control median gap <= 1e-6", s.n),
            s.pure_control_median_gap.is_some_and(|g| g <= 1e-6),
            format!("{:.3e}", s.pure_control_median_gap.unwrap_or(f64::NAN)),
        );
    }
    c.check("runtime < 5 min", elapsed < 300.0, format!("{elapsed:.1} s"));
    c.finish();
}

#[test]
fn criterion_6_purity_correlation() {
    let mut c = Checks::new(6);
    let (records, s) = exp_purity_correlation(3, 10_000, 6, &ExperimentOptions::default()).unwrap();
    let r = s.pearson_r.unwrap_or(f64::NAN);
    c.check("Pearson r >= 0.6", r >= 0.6, format!("r = {r:.4}"));
    let bins = s.purity_bins.clone().unwrap();
    let (bottom, top) = (bins[0].mean_tightness, bins[bins.len() - 1].mean_tightness);
    c.check(
        "top purity decile below bottom decile",
        top < bottom,
        format!("top {top:.4} (n={}), bottom {bottom:.4} (n={})", bins[9].count, bins[0].count),
    );
    let high: Vec<f64> = records
        .iter()
        .filter(|r| r.purity >= 0.95)
        .filter_map(|r| r.tightness)
        .collect();
    let high_mean = high.iter().sum::<f64>() / high.len() as f64;
    c.check(
        "purity >= 0.95 mean below bottom decile",
        high_mean < bottom,
        format!("{high_mean:.4} (n={})", high.len()),
    );
    c.finish();
}

#[test]
fn criterion_7_qutrit_simplex() {
    let mut c = Checks::new(7);
    let (frame, h) = default_qutrit_setup(1).unwrap();
    let (records, s) = exp_qutrit_simplex(&frame, &h, 30, &ExperimentOptions::default()).unwrap();
    c.check(
        "max(tTheta, tPhi) >= tL everywhere",
        s.max_l_excess <= VIOLATION_MARGIN,
        format!("max tL - max(tTheta, tPhi) = {:.3e} over {} points", s.max_l_excess, records.len()),
    );
    c.check(
        "pure vertex |tPhi - tL| <= 1e-8",
        s.pure_vertex_phi_l_gap <= 1e-8,
        format!("{:.3e}", s.pure_vertex_phi_l_gap),
    );
    c.check(
        "tTheta constant along lambda1 = lambda2",
        s.theta_spread_equal_12 <= 1e-8,
        format!("spread {:.3e}", s.theta_spread_equal_12),
    );
    c.check(
        "tTheta constant along lambda1 = lambda3",
        s.theta_spread_equal_13 <= 1e-8,
        format!("spread {:.3e}", s.theta_spread_equal_13),
    );
    c.finish();
}

#[test]
fn criterion_8_complexity_benchmark() {
    let mut c = Checks::new(8);
    let cfg = BenchConfig::default();
    let results = exp_complexity_bench(&cfg, 8).unwrap();
    for r in &results {
        c.check(
            &format!("N={} eta >= 1", r.n),
            r.eta >= 1.0,
            format!("eta = {:.2} (C_L {:.3e} s, C_Theta {:.3e} s)", r.eta, r.c_l, r.c_theta),
        );
    }
    let ns: Vec<f64> = results.iter().map(|r| r.n as f64).collect();
    let etas: Vec<f64> = results.iter().map(|r| r.eta).collect();
    let slope = least_squares_slope(&ns, &etas).unwrap();
    c.check("slope of eta vs N > 0", slope > 0.0, format!("slope = {slope:.3}"));
    c.finish();
}

#[test]
fn criterion_9_property_suites() {
    let mut c = Checks::new(9);

    // Metric axioms on iso-spectral triples.
    let mut rng = RngStream::new(9, 0);
    let (mut identity, mut symmetry, mut triangle) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..1000 {
        let n = 2 + k % 4;
        let mut w: Vec<f64> = (0..n).map(|j| 1.0 + ((k * 7 + j * 3) % 5) as f64).collect();
        w[0] += 5.0;
        let total: f64 = w.iter().sum();
        let spectrum = Spectrum::new(w.iter().map(|x| x / total).collect()).unwrap();
        let a = random_state_fixed_spectrum(&spectrum, &mut rng).unwrap();
        let b = random_state_fixed_spectrum(&spectrum, &mut rng).unwrap();
        let d = random_state_fixed_spectrum(&spectrum, &mut rng).unwrap();
        for dist in [
            |x: &DensityMatrix, y: &DensityMatrix| theta_angle(x, y).unwrap().radians(),
            |x: &DensityMatrix, y: &DensityMatrix| phi_angle(x, y).unwrap().radians(),
        ] {
            identity = identity.max(dist(&a, &a));
            symmetry = symmetry.max((dist(&a, &b) - dist(&b, &a)).abs());
            triangle = triangle.max(dist(&a, &d) - dist(&a, &b) - dist(&b, &d));
        }
    }
    c.check("d(x, x) = 0", identity <= 1e-9, format!("max {identity:.3e}"));
    c.check("d(x, y) = d(y, x)", symmetry <= 1e-9, format!("max asymmetry {symmetry:.3e}"));
    c.check("triangle inequality", triangle <= 1e-9, format!("max excess {triangle:.3e}"));

    // Commutator term against the energy spread.
    let mut worst = f64::NEG_INFINITY;
    for k in 0..1000 {
        let n = 2 + k % 6;
        let rho = random_state_hs(n, &mut rng).unwrap();
        let h = random_hamiltonian(n, &mut rng, None).unwrap();
        let lhs = commutator_term(rho.matrix(), &h).sqrt();
        worst = worst.max(lhs - energy_std_dev(rho.matrix(), &h));
    }
    c.check(
        "sqrt(tr[rho^2 H^2 - (rho H)^2]) <= dE + 1e-9",
        worst <= 1e-9,
        format!("max excess {worst:.3e}"),
    );

    // Finite-difference distance rates converge to the speed functionals.
    let mut non_converging = 0;
    let mut worst_ratio = 0.0f64;
    for k in 0..100 {
        let n = 3 + k % 3;
        let rho = random_state_hs(n, &mut rng).unwrap();
        let h = random_hamiltonian(n, &mut rng, Some(1.0)).unwrap();
        let dt = 2e-2;
        let residuals = |step: f64| {
            let sched = HamiltonianSchedule::constant(h.clone(), step).unwrap();
            let path = evolve(&rho, &sched, 2).unwrap();
            let speeds = speed_samples(&path, &sched).unwrap();
            let sigma = path.final_state();
            let rt = (theta_angle(&rho, sigma).unwrap().radians() / step - speeds[0].q_theta).abs();
            let rp = (phi_angle(&rho, sigma).unwrap().radians() / step - speeds[0].q_phi).abs();
            (rt, rp)
        };
        let (t1, p1) = residuals(dt);
        let (t2, p2) = residuals(dt / 2.0);
        for (r1, r2) in [(t1, t2), (p1, p2)] {
            worst_ratio = worst_ratio.max(r2 / r1);
            if r2 > 0.6 * r1 {
                non_converging += 1;
            }
        }
    }
    c.check(
        "residual(dt/2) <= 0.6 residual(dt)",
        non_converging == 0,
        format!("{non_converging} failures, worst ratio {worst_ratio:.3}"),
    );

    // Bloch round trip and the two Θ routes.
    let (mut round_trip, mut dual) = (0.0f64, 0.0f64);
    for k in 0..1000 {
        let n = 2 + k % 6;
        let rho = random_state_hs(n, &mut rng).unwrap();
        let back = from_bloch(&to_bloch(&rho)).unwrap();
        round_trip = round_trip.max(back.matrix().max_abs_diff(rho.matrix()));
        let sigma = random_state_fixed_spectrum(rho.spectrum(), &mut rng).unwrap();
        let t1 = theta_angle(&rho, &sigma).unwrap().radians();
        let t2 = theta_angle_bloch(&rho, &sigma).unwrap().radians();
        dual = dual.max((t1 - t2).abs());
    }
    c.check("Bloch round trip to 1e-8", round_trip <= 1e-8, format!("max {round_trip:.3e}"));
    c.check("Theta trace form = Bloch form to 1e-8", dual <= 1e-8, format!("max {dual:.3e}"));

    // Validity on sampled instances, including piecewise schedules.
    let (mut invalid, mut total) = (0usize, 0usize);
    let mut worst_excess = f64::NEG_INFINITY;
    for k in 0..500 {
        let n = 2 + k % 5;
        let rho = random_state_hs(n, &mut rng).unwrap();
        let pieces = 1 + k % 3;
        let sched = HamiltonianSchedule::piecewise(
            (0..pieces)
                .map(|_| (0.2 + 0.5 * (k % 4) as f64, random_hamiltonian(n, &mut rng, Some(1.0)).unwrap()))
                .collect(),
        )
        .unwrap();
        let path = evolve(&rho, &sched, 65).unwrap();
        let r = bounds(&rho, path.final_state(), &sched, 65).unwrap();
        let (a, b, d) = r.times();
        let excess = a.max(b).max(d) - r.actual_t;
        worst_excess = worst_excess.max(excess);
        total += 1;
        if excess > 1e-6 {
            invalid += 1;
        }
    }
    c.check(
        "t_i <= T + 1e-6",
        invalid == 0,
        format!("{invalid} / {total} invalid, max t - T = {worst_excess:.3e}"),
    );
    c.finish();
}
