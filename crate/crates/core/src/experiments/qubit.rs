use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentId, ExperimentOptions, ExperimentRecord, RecordParams, VIOLATION_MARGIN};
use crate::dynamics::{bounds_with, evolve, qubit_analytic_bounds, qubit_instance, QubitBounds};
use crate::sampling::RngStream;
use crate::table::fmt;
use crate::{Error, Result};

pub const QUBIT_CSV_HEADER: [&str; 9] = [
    "lambda",
    "theta",
    "tL",
    "tTheta",
    "tPhi",
    "tTheta_analytic",
    "tPhi_analytic",
    "tL_analytic",
    "agree",
];

/// Numeric and closed-form bounds agree within this.
pub const AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QubitCurveRecord {
    pub record: ExperimentRecord,
    pub lambda: f64,
    pub theta: f64,
    pub analytic: QubitBounds,
    pub agree: bool,
}

impl QubitCurveRecord {
    pub fn max_analytic_deviation(&self) -> f64 {
        let r = &self.record;
        let a = &self.analytic;
        [(r.t_l - a.t_l), (r.t_theta - a.t_theta), (r.t_phi - a.t_phi)]
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()))
    }

    pub fn csv_row(&self) -> Vec<String> {
        let r = &self.record;
        vec![
            fmt(self.lambda),
            fmt(self.theta),
            fmt(r.t_l),
            fmt(r.t_theta),
            fmt(r.t_phi),
            fmt(self.analytic.t_theta),
            fmt(self.analytic.t_phi),
            fmt(self.analytic.t_l),
            self.agree.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QubitCurveSummary {
    pub records: usize,
    pub all_agree: bool,
    pub max_analytic_deviation: f64,
    /// Largest `|T_Θ − θ|`.
    pub max_theta_attainability_error: f64,
    /// Largest breach of `T_Θ ≥ T_Φ ≥ T_L`.
    pub max_hierarchy_breach: f64,
    /// Largest difference between records at `λ` and `1 − λ` (same `θ`),
    /// over pairs present in the grid.
    pub max_symmetry_deviation: f64,
    pub runtime_secs: f64,
}

/// Bounds for every `(λ, θ)` of the grid, numerically and in closed form.
/// The Hamiltonian phase of each record is drawn from `seed`; the bounds do
/// not depend on it.
pub fn exp_qubit_curves(
    lambdas: &[f64],
    thetas: &[f64],
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<(Vec<QubitCurveRecord>, QubitCurveSummary)> {
    for &l in lambdas {
        if !(l > 0.0 && l < 1.0) || l == 0.5 {
            return Err(Error::DomainError(format!("lambda = {l} outside (0, 1) \\ {{1/2}}")));
        }
    }
    for &t in thetas {
        if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&t) {
            return Err(Error::DomainError(format!("theta = {t} outside [0, pi/2]")));
        }
    }
    let start = std::time::Instant::now();
    let root = RngStream::new(seed, 0);
    let cells: Vec<(f64, f64)> = lambdas
        .iter()
        .flat_map(|&l| thetas.iter().map(move |&t| (l, t)))
        .collect();
    let records = opts.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, &(lambda, theta))| {
                let phase = root.derive(i as u64).random_range(0.0..std::f64::consts::TAU);
                qubit_record(lambda, theta, phase, opts)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let summary = summarize(&records, start.elapsed().as_secs_f64());
    Ok((records, summary))
}

fn qubit_record(lambda: f64, theta: f64, phase: f64, opts: &ExperimentOptions) -> Result<QubitCurveRecord> {
    let analytic = qubit_analytic_bounds(theta, lambda)?;
    let (rho, sched) = qubit_instance(theta.max(f64::MIN_POSITIVE), lambda, phase)?;
    let params = RecordParams::Qubit { lambda, theta, phase };
    let record = if theta == 0.0 {
        // No evolution: every distance, hence every bound, is zero.
        ExperimentRecord {
            experiment: ExperimentId::QubitCurves,
            n: 2,
            params,
            purity: rho.purity(),
            actual_t: 0.0,
            t_l: 0.0,
            t_theta: 0.0,
            t_phi: 0.0,
            tightness: None,
            region: super::Region::Theta,
        }
    } else {
        let path = evolve(&rho, &sched, opts.grid_points)?;
        let report = bounds_with(&rho, path.final_state(), &sched, opts.grid_points, opts.denominator)?;
        ExperimentRecord::from_report(ExperimentId::QubitCurves, params, rho.purity(), &report)
    };
    let mut out = QubitCurveRecord {
        record,
        lambda,
        theta,
        analytic,
        agree: false,
    };
    out.agree = out.max_analytic_deviation() <= AGREEMENT_TOL;
    Ok(out)
}

fn summarize(records: &[QubitCurveRecord], runtime_secs: f64) -> QubitCurveSummary {
    let mut max_sym = 0.0f64;
    for a in records {
        let mirror = records
            .iter()
            .find(|b| (b.lambda - (1.0 - a.lambda)).abs() < 1e-12 && b.theta == a.theta);
        if let Some(b) = mirror {
            let (ra, rb) = (&a.record, &b.record);
            for d in [ra.t_l - rb.t_l, ra.t_theta - rb.t_theta, ra.t_phi - rb.t_phi] {
                max_sym = max_sym.max(d.abs());
            }
        }
    }
    QubitCurveSummary {
        records: records.len(),
        all_agree: records.iter().all(|r| r.agree),
        max_analytic_deviation: records.iter().map(|r| r.max_analytic_deviation()).fold(0.0, f64::max),
        max_theta_attainability_error: records
            .iter()
            .map(|r| (r.record.t_theta - r.theta).abs())
            .fold(0.0, f64::max),
        max_hierarchy_breach: records
            .iter()
            .map(|r| {
                let r = &r.record;
                (r.t_phi - r.t_theta).max(r.t_l - r.t_phi).max(0.0)
            })
            .fold(0.0, f64::max),
        max_symmetry_deviation: max_sym,
        runtime_secs,
    }
}

/// Hierarchy holds up to the violation margin.
pub fn hierarchy_holds(r: &ExperimentRecord) -> bool {
    r.t_theta >= r.t_phi - VIOLATION_MARGIN && r.t_phi >= r.t_l - VIOLATION_MARGIN
}
