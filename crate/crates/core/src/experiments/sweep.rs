use rayon::prelude::*;
use serde::Serialize;

use super::{median, pearson, ExperimentId, ExperimentOptions, ExperimentRecord, RecordParams, SweepSummary};
use crate::dynamics::{bounds_with, evolve, HamiltonianSchedule};
use crate::sampling::{
    purity_stratified_states, random_hamiltonian, random_state_fixed_spectrum, random_state_hs, RngStream,
};
use crate::state::{DensityMatrix, Spectrum};
use crate::{Error, Result};

pub const SWEEP_CSV_HEADER: [&str; 8] = ["N", "sample", "purity", "tL", "tTheta", "tPhi", "tightness", "region"];

/// Pure states drawn for the control batch of each dimension.
const CONTROL_BATCH: usize = 1000;

/// Stream ids: sweep samples use `N`, control batches `CONTROL_STREAM + N`,
/// purity-correlation samples `PURITY_STREAM + N`.
const CONTROL_STREAM: u64 = 1 << 20;
const PURITY_STREAM: u64 = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PurityBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_tightness: f64,
}

/// Drives `rho` with a norm-1 GUE Hamiltonian for unit time and bounds the
/// transit to the endpoint.
fn random_instance(
    experiment: ExperimentId,
    index: usize,
    rho: DensityMatrix,
    rng: &mut RngStream,
    opts: &ExperimentOptions,
) -> Result<ExperimentRecord> {
    let h = random_hamiltonian(rho.dim(), rng, Some(1.0))?;
    let sched = HamiltonianSchedule::constant(h, 1.0)?;
    let path = evolve(&rho, &sched, opts.grid_points)?;
    let report = bounds_with(&rho, path.final_state(), &sched, opts.grid_points, opts.denominator)?;
    Ok(ExperimentRecord::from_report(
        experiment,
        RecordParams::Sample { index },
        rho.purity(),
        &report,
    ))
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension { dim: n, min: 2 });
    }
    Ok(())
}

/// Hilbert-Schmidt states under random Hamiltonians, per dimension, plus a
/// pure-state control batch whose median gap should vanish.
pub fn exp_tightness_sweep(
    ns: &[usize],
    samples: usize,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<(Vec<ExperimentRecord>, Vec<SweepSummary>)> {
    let mut all = Vec::with_capacity(ns.len() * samples);
    let mut summaries = Vec::with_capacity(ns.len());
    for &n in ns {
        check_n(n)?;
        let start = std::time::Instant::now();
        let root = RngStream::new(seed, n as u64);
        let records = opts.install(|| {
            (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = root.derive(i as u64);
                    let rho = random_state_hs(n, &mut rng)?;
                    random_instance(ExperimentId::TightnessSweep, i, rho, &mut rng, opts)
                })
                .collect::<Result<Vec<_>>>()
        })??;

        let control_root = RngStream::new(seed, CONTROL_STREAM + n as u64);
        let pure = Spectrum::pure(n);
        let gaps = opts.install(|| {
            (0..CONTROL_BATCH.min(samples.max(1)))
                .into_par_iter()
                .map(|i| {
                    let mut rng = control_root.derive(i as u64);
                    let rho = random_state_fixed_spectrum(&pure, &mut rng)?;
                    let r = random_instance(ExperimentId::TightnessSweep, i, rho, &mut rng, opts)?;
                    let reference = if n == 2 { r.t_theta } else { r.t_phi };
                    Ok(if reference > 0.0 { 1.0 - r.t_l / reference } else { 0.0 })
                })
                .collect::<Result<Vec<f64>>>()
        })??;

        let mut summary = SweepSummary::from_records(n, &records, start.elapsed().as_secs_f64());
        summary.pure_control_median_gap = Some(median(&gaps));
        summaries.push(summary);
        all.extend(records);
    }
    Ok((all, summaries))
}

/// Tightness against mixedness for states with purity spread uniformly.
pub fn exp_purity_correlation(
    n: usize,
    samples: usize,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<(Vec<ExperimentRecord>, SweepSummary)> {
    check_n(n)?;
    let start = std::time::Instant::now();
    let root = RngStream::new(seed, PURITY_STREAM + n as u64);
    let records = opts.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = root.derive(i as u64);
                let rho = purity_stratified_states(n, 1, &mut rng)?.pop().expect("one state requested");
                random_instance(ExperimentId::PurityCorrelation, i, rho, &mut rng, opts)
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let (mixedness, tight): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter_map(|r| r.tightness.map(|t| (1.0 - r.purity, t)))
        .unzip();
    let mut summary = SweepSummary::from_records(n, &records, start.elapsed().as_secs_f64());
    summary.pearson_r = pearson(&mixedness, &tight).ok();
    summary.purity_bins = Some(purity_bins(n, &records, 10));
    Ok((records, summary))
}

/// Equal-width purity bins over `[1/N, 1]`; empty bins have NaN means.
pub fn purity_bins(n: usize, records: &[ExperimentRecord], bins: usize) -> Vec<PurityBin> {
    let lo = 1.0 / n as f64;
    let width = (1.0 - lo) / bins as f64;
    let mut sums = vec![(0usize, 0.0f64); bins];
    for r in records {
        if let Some(t) = r.tightness {
            let k = (((r.purity - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            sums[k].0 += 1;
            sums[k].1 += t;
        }
    }
    sums.into_iter()
        .enumerate()
        .map(|(k, (count, sum))| PurityBin {
            lo: lo + k as f64 * width,
            hi: lo + (k + 1) as f64 * width,
            count,
            mean_tightness: if count > 0 { sum / count as f64 } else { f64::NAN },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(threads: usize) -> ExperimentOptions {
        ExperimentOptions {
            grid_points: 5,
            threads: Some(threads),
            ..Default::default()
        }
    }

    #[test]
    fn sweep_is_thread_independent() {
        let (a, sa) = exp_tightness_sweep(&[3], 40, 11, &opts(1)).unwrap();
        let (b, sb) = exp_tightness_sweep(&[3], 40, 11, &opts(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa[0].violations, sb[0].violations);
        assert_eq!(sa[0].invalid_bounds, 0);
        assert!(sa[0].pure_control_median_gap.unwrap() < 1e-6);
    }

    #[test]
    fn qubit_control_uses_theta() {
        let (_, s) = exp_tightness_sweep(&[2], 30, 5, &opts(2)).unwrap();
        assert!(s[0].pure_control_median_gap.unwrap() < 1e-6);
    }

    #[test]
    fn correlation_summary() {
        let (records, s) = exp_purity_correlation(3, 300, 2, &opts(2)).unwrap();
        assert_eq!(records.len(), 300);
        let bins = s.purity_bins.unwrap();
        assert_eq!(bins.len(), 10);
        assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 300);
        assert!(s.pearson_r.unwrap() > 0.0);
    }
}
