//! The numerical studies: qubit bound curves, the qutrit spectrum region,
//! random tightness sweeps, purity correlation and the distance-cost
//! benchmark. Each returns plain records plus a summary; file output is left
//! to the caller.

use serde::Serialize;

use crate::dynamics::{BoundReport, BuresDenominator, DEFAULT_GRID_POINTS};
use crate::table::{fmt, fmt_opt};
use crate::{Error, Result};

mod bench;
pub mod plot;
mod qubit;
mod qutrit;
mod sweep;

pub use bench::{exp_complexity_bench, BenchConfig, BenchResult, BENCH_CSV_HEADER};
pub use qubit::{exp_qubit_curves, hierarchy_holds, QubitCurveRecord, QubitCurveSummary, AGREEMENT_TOL, QUBIT_CSV_HEADER};
pub use qutrit::{default_qutrit_setup, exp_qutrit_simplex, QutritRecord, QutritSummary, QUTRIT_CSV_HEADER};
pub use sweep::{exp_purity_correlation, exp_tightness_sweep, purity_bins, PurityBin, SWEEP_CSV_HEADER};

/// A bound counts as violated only beyond this margin, so round-off ties
/// are not reported.
pub const VIOLATION_MARGIN: f64 = 1e-9;

/// Every bound must stay below the true evolution time by this slack.
pub const VALIDITY_SLACK: f64 = 1e-6;

/// Knobs shared by the sampled experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentOptions {
    pub grid_points: usize,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub denominator: BuresDenominator,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            threads: None,
            denominator: BuresDenominator::default(),
        }
    }
}

impl ExperimentOptions {
    /// Runs `f` on a pool with the configured thread count. Results never
    /// depend on the count: every sample owns a derived stream.
    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t.max(1))
                    .build()
                    .map_err(|e| Error::NumericalFailure(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExperimentId {
    #[serde(rename = "qubit-curves")]
    QubitCurves,
    #[serde(rename = "qutrit-simplex")]
    QutritSimplex,
    #[serde(rename = "tightness-sweep")]
    TightnessSweep,
    #[serde(rename = "purity-correlation")]
    PurityCorrelation,
}

/// Which bound is largest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    L,
    Theta,
    Phi,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::L => "L",
            Region::Theta => "Theta",
            Region::Phi => "Phi",
        }
    }

    /// Ties go to `Theta`, then `Phi`.
    pub fn of(t_l: f64, t_theta: f64, t_phi: f64) -> Region {
        if t_theta >= t_phi && t_theta >= t_l {
            Region::Theta
        } else if t_phi >= t_l {
            Region::Phi
        } else {
            Region::L
        }
    }
}

/// `1 − T_L / max(T_Θ, T_Φ)`, undefined when both new bounds vanish.
pub fn tightness(t_l: f64, t_theta: f64, t_phi: f64) -> Option<f64> {
    let m = t_theta.max(t_phi);
    (m > 0.0 && m.is_finite()).then(|| 1.0 - t_l / m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RecordParams {
    Qubit { lambda: f64, theta: f64, phase: f64 },
    Qutrit { lambdas: [f64; 3] },
    Sample { index: usize },
}

/// One evaluated instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentRecord {
    pub experiment: ExperimentId,
    pub n: usize,
    pub params: RecordParams,
    pub purity: f64,
    pub actual_t: f64,
    pub t_l: f64,
    pub t_theta: f64,
    pub t_phi: f64,
    pub tightness: Option<f64>,
    pub region: Region,
}

impl ExperimentRecord {
    pub fn from_report(experiment: ExperimentId, params: RecordParams, purity: f64, report: &BoundReport) -> Self {
        let (t_l, t_theta, t_phi) = report.times();
        Self {
            experiment,
            n: report.dim,
            params,
            purity,
            actual_t: report.actual_t,
            t_l,
            t_theta,
            t_phi,
            tightness: tightness(t_l, t_theta, t_phi),
            region: Region::of(t_l, t_theta, t_phi),
        }
    }

    pub fn max_new_bound(&self) -> f64 {
        self.t_theta.max(self.t_phi)
    }

    /// `T_L` exceeds both new bounds beyond [`VIOLATION_MARGIN`].
    pub fn is_violation(&self) -> bool {
        self.t_l - self.max_new_bound() > VIOLATION_MARGIN
    }

    /// `T_L / max − 1` when violated, else 0.
    pub fn relative_excess(&self) -> f64 {
        if self.is_violation() {
            self.t_l / self.max_new_bound() - 1.0
        } else {
            0.0
        }
    }

    /// Every bound is at most the actual time.
    pub fn is_valid(&self) -> bool {
        [self.t_l, self.t_theta, self.t_phi]
            .iter()
            .all(|&t| t <= self.actual_t + VALIDITY_SLACK)
    }

    /// Row under [`SWEEP_CSV_HEADER`].
    pub fn sample_csv_row(&self) -> Vec<String> {
        let index = match self.params {
            RecordParams::Sample { index } => index.to_string(),
            _ => String::new(),
        };
        vec![
            self.n.to_string(),
            index,
            fmt(self.purity),
            fmt(self.t_l),
            fmt(self.t_theta),
            fmt(self.t_phi),
            fmt_opt(self.tightness),
            self.region.as_str().to_string(),
        ]
    }
}

/// Aggregate statistics of one sampled batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepSummary {
    pub n: usize,
    pub samples: usize,
    pub violations: usize,
    pub violation_fraction: f64,
    pub max_relative_excess: f64,
    pub mean_tightness: f64,
    pub median_tightness: f64,
    /// Instances where some bound exceeded the true time.
    pub invalid_bounds: usize,
    pub region_counts: RegionCounts,
    /// Pearson r of tightness against `1 − purity`.
    pub pearson_r: Option<f64>,
    /// Mean tightness in equal-width purity bins over `[1/N, 1]`.
    pub purity_bins: Option<Vec<PurityBin>>,
    /// Median `1 − T_L/T_Φ` (`1 − T_L/T_Θ` for qubits) on pure states.
    pub pure_control_median_gap: Option<f64>,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RegionCounts {
    pub l: usize,
    pub theta: usize,
    pub phi: usize,
}

impl SweepSummary {
    pub(crate) fn from_records(n: usize, records: &[ExperimentRecord], runtime_secs: f64) -> Self {
        let violations = records.iter().filter(|r| r.is_violation()).count();
        let tight: Vec<f64> = records.iter().filter_map(|r| r.tightness).collect();
        let mut regions = RegionCounts::default();
        for r in records {
            match r.region {
                Region::L => regions.l += 1,
                Region::Theta => regions.theta += 1,
                Region::Phi => regions.phi += 1,
            }
        }
        Self {
            n,
            samples: records.len(),
            violations,
            violation_fraction: if records.is_empty() {
                0.0
            } else {
                violations as f64 / records.len() as f64
            },
            max_relative_excess: records.iter().map(|r| r.relative_excess()).fold(0.0, f64::max),
            mean_tightness: mean(&tight),
            median_tightness: median(&tight),
            invalid_bounds: records.iter().filter(|r| !r.is_valid()).count(),
            region_counts: regions,
            pearson_r: None,
            purity_bins: None,
            pure_control_median_gap: None,
            runtime_secs,
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn centered_moments(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateData(format!("need at least 2 points, got {}", xs.len())));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok((sxy, sxx, syy))
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let (sxy, sxx, syy) = centered_moments(xs, ys)?;
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateData("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let (sxy, sxx, _) = centered_moments(xs, ys)?;
    if sxx == 0.0 {
        return Err(Error::DegenerateData("zero variance in xs".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let up: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let down: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson(&xs, &up).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&xs, &down).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(pearson(&[1.0, 1.0], &[2.0, 3.0]), Err(Error::DegenerateData(_))));
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn slope_and_medians() {
        assert!((least_squares_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn tightness_and_regions() {
        assert_eq!(tightness(0.5, 1.0, 0.8), Some(0.5));
        assert_eq!(tightness(0.0, 0.0, 0.0), None);
        assert_eq!(Region::of(0.5, 1.0, 0.8), Region::Theta);
        assert_eq!(Region::of(0.5, 0.4, 0.8), Region::Phi);
        assert_eq!(Region::of(0.9, 0.4, 0.8), Region::L);
    }
}
