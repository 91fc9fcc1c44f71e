use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentId, ExperimentOptions, ExperimentRecord, RecordParams, RegionCounts, Region};
use crate::dynamics::{bounds_with, evolve, HamiltonianSchedule};
use crate::linalg::ComplexMatrix;
use crate::sampling::{haar_unitary, qutrit_region1_grid, random_hamiltonian, RegionEdge, RngStream};
use crate::state::DensityMatrix;
use crate::table::{fmt, fmt_opt};
use crate::{Error, Result};

pub const QUTRIT_CSV_HEADER: [&str; 10] = [
    "lambda1", "lambda2", "lambda3", "purity", "tL", "tTheta", "tPhi", "tightness", "region", "edge",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QutritRecord {
    pub record: ExperimentRecord,
    pub lambdas: [f64; 3],
    pub edge: RegionEdge,
    pub pure_vertex: bool,
}

impl QutritRecord {
    pub fn csv_row(&self) -> Vec<String> {
        let r = &self.record;
        let edge = serde_json::to_value(self.edge)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        vec![
            fmt(self.lambdas[0]),
            fmt(self.lambdas[1]),
            fmt(self.lambdas[2]),
            fmt(r.purity),
            fmt(r.t_l),
            fmt(r.t_theta),
            fmt(r.t_phi),
            fmt_opt(r.tightness),
            r.region.as_str().to_string(),
            edge,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QutritSummary {
    pub resolution: usize,
    pub points: usize,
    /// Largest `T_L − max(T_Θ, T_Φ)`; non-positive when `T_L` never wins.
    pub max_l_excess: f64,
    /// `|T_Φ − T_L|` at the pure vertex.
    pub pure_vertex_phi_l_gap: f64,
    /// `max − min` of `T_Θ` along the `λ₁ = λ₂` edge.
    pub theta_spread_equal_12: f64,
    /// `max − min` of `T_Θ` along the `λ₁ = λ₃` edge.
    pub theta_spread_equal_13: f64,
    pub region_counts: RegionCounts,
    pub runtime_secs: f64,
}

/// Default eigenframe and Hamiltonian (operator norm 1), drawn from `seed`.
pub fn default_qutrit_setup(seed: u64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let root = RngStream::new(seed, 0);
    let frame = haar_unitary(3, &mut root.derive(0))?;
    let h = random_hamiltonian(3, &mut root.derive(1), Some(1.0))?;
    Ok((frame, h))
}

/// Bounds over region ① of the qutrit spectra. Each point is the state
/// `V diag(λ) V†` driven by `H` for unit time; the maximally mixed center
/// is skipped.
pub fn exp_qutrit_simplex(
    frame: &ComplexMatrix,
    h: &ComplexMatrix,
    resolution: usize,
    opts: &ExperimentOptions,
) -> Result<(Vec<QutritRecord>, QutritSummary)> {
    if frame.dim() != 3 || h.dim() != 3 {
        return Err(Error::InvalidDimension {
            dim: frame.dim().min(h.dim()),
            min: 3,
        });
    }
    if frame.unitarity_residual() > 1e-8 {
        return Err(Error::DomainError("eigenframe is not unitary".into()));
    }
    let start = std::time::Instant::now();
    let sched = HamiltonianSchedule::constant(h.clone(), 1.0)?;
    let grid: Vec<_> = qutrit_region1_grid(resolution)?
        .into_iter()
        .filter(|g| !g.is_center(resolution))
        .collect();
    let records = opts.install(|| {
        grid.par_iter()
            .map(|g| {
                let lambdas = g.point.lambdas;
                let rho = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&lambdas).conjugate_by(frame))?;
                let path = evolve(&rho, &sched, opts.grid_points)?;
                let report = bounds_with(&rho, path.final_state(), &sched, opts.grid_points, opts.denominator)?;
                let params = RecordParams::Qutrit { lambdas };
                Ok(QutritRecord {
                    record: ExperimentRecord::from_report(ExperimentId::QutritSimplex, params, rho.purity(), &report),
                    lambdas,
                    edge: g.edge(resolution),
                    pure_vertex: g.is_pure_vertex(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let spread = |edge: RegionEdge| {
        let vals: Vec<f64> = records
            .iter()
            .filter(|r| r.edge == edge || (edge == RegionEdge::EqualOneTwo && r.pure_vertex))
            .map(|r| r.record.t_theta)
            .collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if vals.is_empty() { 0.0 } else { hi - lo }
    };
    let mut counts = RegionCounts::default();
    for r in &records {
        match r.record.region {
            Region::L => counts.l += 1,
            Region::Theta => counts.theta += 1,
            Region::Phi => counts.phi += 1,
        }
    }
    let pure = records.iter().find(|r| r.pure_vertex).map(|r| &r.record);
    let summary = QutritSummary {
        resolution,
        points: records.len(),
        max_l_excess: records
            .iter()
            .map(|r| r.record.t_l - r.record.max_new_bound())
            .fold(f64::NEG_INFINITY, f64::max),
        pure_vertex_phi_l_gap: pure.map_or(f64::NAN, |r| (r.t_phi - r.t_l).abs()),
        theta_spread_equal_12: spread(RegionEdge::EqualOneTwo),
        theta_spread_equal_13: spread(RegionEdge::EqualOneThree),
        region_counts: counts,
        runtime_secs: start.elapsed().as_secs_f64(),
    };
    Ok((records, summary))
}
