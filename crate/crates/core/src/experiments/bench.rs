use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use super::median;
use crate::metrics::{bures_angle, theta_angle};
use crate::sampling::{haar_unitary, random_state_fixed_spectrum, RngStream};
use crate::state::{generator_basis, DensityMatrix, Spectrum};
use crate::table::fmt;
use crate::{Error, Result};

pub const BENCH_CSV_HEADER: [&str; 6] = ["N", "C_L", "C_Theta", "eta", "rel_se_L", "rel_se_Theta"];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    /// Timed batches per measurement; the reported cost is their median.
    pub batches: usize,
    /// Minimum wall time of one batch; the call count per batch is
    /// calibrated to reach it.
    pub min_batch_secs: f64,
    /// Distinct state pairs cycled through.
    pub pairs: usize,
    /// Calls per batch are doubled until the relative standard error drops below
    /// this, at most `max_refinements` times.
    pub target_rel_se: f64,
    pub max_refinements: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            ns: (1..=10).map(|k| 4 * k).collect(),
            batches: 15,
            min_batch_secs: 2e-3,
            pairs: 8,
            target_rel_se: 1e-2,
            max_refinements: 4,
        }
    }
}

/// Mean seconds per call for both distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchResult {
    pub n: usize,
    pub c_l: f64,
    pub c_theta: f64,
    pub eta: f64,
    pub rel_se_l: f64,
    pub rel_se_theta: f64,
    pub calls_per_batch_l: usize,
    pub calls_per_batch_theta: usize,
}

impl BenchResult {
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt(self.c_l),
            fmt(self.c_theta),
            fmt(self.eta),
            fmt(self.rel_se_l),
            fmt(self.rel_se_theta),
        ]
    }
}

struct Timing {
    per_call: f64,
    rel_se: f64,
    calls: usize,
}

fn time_batch(calls: usize, f: &mut impl FnMut(usize)) -> f64 {
    let start = Instant::now();
    for k in 0..calls {
        f(k);
    }
    start.elapsed().as_secs_f64() / calls as f64
}

/// Median of batch means, with the standard error of the batch means.
fn measure(cfg: &BenchConfig, mut f: impl FnMut(usize)) -> Timing {
    // Warm-up and calibration: grow the batch until it takes long enough.
    let mut calls = 1usize;
    loop {
        let start = Instant::now();
        for k in 0..calls {
            f(k);
        }
        if start.elapsed().as_secs_f64() >= cfg.min_batch_secs || calls >= 1 << 24 {
            break;
        }
        calls *= 2;
    }
    let mut refinements = 0;
    loop {
        let means: Vec<f64> = (0..cfg.batches).map(|_| time_batch(calls, &mut f)).collect();
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() as f64 - 1.0).max(1.0);
        let rel_se = (var / means.len() as f64).sqrt() / m;
        if rel_se <= cfg.target_rel_se || refinements >= cfg.max_refinements {
            return Timing {
                per_call: median(&means),
                rel_se,
                calls,
            };
        }
        refinements += 1;
        calls *= 2;
    }
}

/// Cost of the Bures angle (two eigendecompositions and a matrix square
/// root) against the trace-form `Θ` on the same random iso-spectral pairs.
/// Runs on the calling thread only.
pub fn exp_complexity_bench(cfg: &BenchConfig, seed: u64) -> Result<Vec<BenchResult>> {
    if cfg.batches < 2 || cfg.pairs == 0 {
        return Err(Error::DomainError("need at least 2 batches and 1 pair".into()));
    }
    cfg.ns
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::InvalidDimension { dim: n, min: 2 });
            }
            // Basis construction is memoized and kept out of the timings.
            generator_basis(n)?;
            let mut rng = RngStream::new(seed, n as u64);
            let pairs: Vec<(DensityMatrix, DensityMatrix)> = (0..cfg.pairs)
                .map(|_| {
                    let u = haar_unitary(n, &mut rng)?;
                    let w: Vec<f64> = (0..n).map(|k| (k + 1) as f64 * u[(k, 0)].norm_sqr() + 1e-3).collect();
                    let total: f64 = w.iter().sum();
                    let spectrum = Spectrum::new(w.iter().map(|x| x / total).collect())?;
                    Ok((
                        random_state_fixed_spectrum(&spectrum, &mut rng)?,
                        random_state_fixed_spectrum(&spectrum, &mut rng)?,
                    ))
                })
                .collect::<Result<_>>()?;
            for (a, b) in &pairs {
                bures_angle(a, b)?;
                theta_angle(a, b)?;
            }
            let bures = measure(cfg, |k| {
                let (a, b) = &pairs[k % pairs.len()];
                black_box(bures_angle(black_box(a), black_box(b)).ok());
            });
            let theta = measure(cfg, |k| {
                let (a, b) = &pairs[k % pairs.len()];
                black_box(theta_angle(black_box(a), black_box(b)).ok());
            });
            Ok(BenchResult {
                n,
                c_l: bures.per_call,
                c_theta: theta.per_call,
                eta: bures.per_call / theta.per_call,
                rel_se_l: bures.rel_se,
                rel_se_theta: theta.rel_se,
                calls_per_batch_l: bures.calls,
                calls_per_batch_theta: theta.calls,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bench_runs() {
        let cfg = BenchConfig {
            ns: vec![3, 6],
            batches: 3,
            min_batch_secs: 1e-4,
            max_refinements: 0,
            ..Default::default()
        };
        let out = exp_complexity_bench(&cfg, 1).unwrap();
        assert_eq!(out.len(), 2);
        for r in &out {
            assert!(r.c_l > 0.0 && r.c_theta > 0.0 && r.eta.is_finite());
            assert_eq!(r.csv_row().len(), BENCH_CSV_HEADER.len());
        }
    }
}
