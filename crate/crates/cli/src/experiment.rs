use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{ensure, Context};
use clap::{Args, ValueEnum};
use qsl_core::experiments::plot::{render, Series, Style};
use qsl_core::experiments::{
    default_qutrit_setup, exp_complexity_bench, exp_purity_correlation, exp_qubit_curves, exp_qutrit_simplex,
    exp_tightness_sweep, BenchConfig, ExperimentOptions, ExperimentRecord, Region, BENCH_CSV_HEADER,
    QUBIT_CSV_HEADER, QUTRIT_CSV_HEADER, SWEEP_CSV_HEADER,
};
use qsl_core::ComplexMatrix;
use serde::{Deserialize, Serialize};

use crate::output::{config_hash, write_csv, write_json, write_text, VERSION};
use crate::{install_tolerance, Denominator, NumericArgs, OutArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    /// Qubit bounds over a (λ, θ) grid, numeric and closed form.
    QubitCurves,
    /// Bounds over the qutrit spectrum region λ₂ ≤ λ₁ ≤ λ₃.
    QutritSimplex,
    /// Tightness of the Bures bound on Hilbert-Schmidt random states.
    TightnessSweep,
    /// Tightness against mixedness on purity-stratified states.
    PurityCorrelation,
    /// Cost of the Bures angle against Θ as the dimension grows.
    ComplexityBench,
}

impl ExperimentName {
    fn stem(self) -> &'static str {
        match self {
            ExperimentName::QubitCurves => "qubit_curves",
            ExperimentName::QutritSimplex => "qutrit_simplex",
            ExperimentName::TightnessSweep => "tightness_sweep",
            ExperimentName::PurityCorrelation => "purity_correlation",
            ExperimentName::ComplexityBench => "complexity_bench",
        }
    }

    fn default_dims(self) -> &'static str {
        match self {
            ExperimentName::ComplexityBench => "4..40:4",
            ExperimentName::PurityCorrelation => "3",
            _ => "3..6",
        }
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Which experiment to run.
    #[arg(value_enum)]
    name: ExperimentName,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Also write an SVG plot.
    #[arg(long)]
    plot: bool,
    /// Dimensions: `3`, `3..6` (inclusive), `4..40:4` (with step) or `3,5,8`.
    /// Defaults: 3..6 for tightness-sweep, 3 for purity-correlation,
    /// 4..40:4 for complexity-bench.
    #[arg(long = "n")]
    dims: Option<String>,
    /// Samples per dimension (sweeps).
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Number of λ values in [0.05, 0.95]; λ = 1/2 is dropped (qubit-curves).
    #[arg(long, default_value_t = 19)]
    lambdas: usize,
    /// Number of θ values in [0.1, π/2] (qubit-curves).
    #[arg(long, default_value_t = 16)]
    thetas: usize,
    /// Grid resolution of the spectrum region (qutrit-simplex).
    #[arg(long, default_value_t = 30)]
    resolution: usize,
    /// Eigenframe of the qutrit states, a JSON unitary; drawn from the seed
    /// when absent (qutrit-simplex).
    #[arg(long)]
    frame: Option<PathBuf>,
    /// Qutrit Hamiltonian, a JSON matrix applied for unit time; a norm-1 GUE
    /// draw from the seed when absent (qutrit-simplex).
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// Timed batches per measurement (complexity-bench).
    #[arg(long, default_value_t = 15)]
    repetitions: usize,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    /// Sidecar JSON written by an earlier `qsl experiment` run.
    sidecar: PathBuf,
    /// Output directory; defaults to the one recorded in the sidecar.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentName,
    pub seed: u64,
    pub grid_points: usize,
    pub tol: Option<f64>,
    pub denominator: Denominator,
    pub dims: Vec<usize>,
    pub samples: usize,
    pub lambdas: usize,
    pub thetas: usize,
    pub resolution: usize,
    pub repetitions: usize,
    pub frame: Option<ComplexMatrix>,
    pub hamiltonian: Option<ComplexMatrix>,
    /// Not part of the hash: neither changes results.
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub plot: bool,
}

impl RunConfig {
    fn hash(&self) -> anyhow::Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(map) = v.as_object_mut() {
            for key in ["threads", "out", "plot"] {
                map.remove(key);
            }
            map.insert("version".into(), VERSION.into());
        }
        config_hash(&v)
    }

    fn validate(&self) -> anyhow::Result<()> {
        ensure!(self.grid_points >= 2, "grid points must be at least 2");
        ensure!(self.threads != Some(0), "--threads must be positive");
        match self.experiment {
            ExperimentName::QubitCurves => {
                ensure!(self.lambdas >= 2, "--lambdas must be at least 2");
                ensure!(self.thetas >= 2, "--thetas must be at least 2");
            }
            ExperimentName::QutritSimplex => ensure!(self.resolution >= 2, "--resolution must be at least 2"),
            ExperimentName::TightnessSweep | ExperimentName::PurityCorrelation => {
                ensure!(self.samples >= 1, "--samples must be positive");
                ensure!(self.dims.iter().all(|&n| n >= 2), "dimensions must be at least 2");
            }
            ExperimentName::ComplexityBench => {
                ensure!(self.repetitions >= 2, "--repetitions must be at least 2");
                ensure!(self.dims.iter().all(|&n| n >= 2), "dimensions must be at least 2");
            }
        }
        if self.experiment == ExperimentName::PurityCorrelation {
            ensure!(self.dims.len() == 1, "purity-correlation takes a single dimension");
        }
        Ok(())
    }

    fn options(&self) -> ExperimentOptions {
        ExperimentOptions {
            grid_points: self.grid_points,
            threads: self.threads,
            denominator: self.denominator.into(),
        }
    }
}

/// Parses `3`, `3..6`, `4..40:4` or `3,5,8`.
pub fn parse_dims(s: &str) -> anyhow::Result<Vec<usize>> {
    let s = s.trim();
    let dims: Vec<usize> = if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, step)) => (b, step.trim().parse::<usize>().context("bad step")?),
            None => (rest, 1),
        };
        let (a, b): (usize, usize) = (a.trim().parse().context("bad range start")?, b.trim().parse().context("bad range end")?);
        ensure!(step > 0 && a <= b, "empty dimension range {s}");
        (a..=b).step_by(step).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse::<usize>().with_context(|| format!("bad dimension {x:?}")))
            .collect::<anyhow::Result<_>>()?
    };
    ensure!(!dims.is_empty(), "no dimensions given");
    Ok(dims)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn read_matrix(path: &Path) -> anyhow::Result<ComplexMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

pub fn run(args: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let dims = parse_dims(args.dims.as_deref().unwrap_or(args.name.default_dims()))?;
    let config = RunConfig {
        experiment: args.name,
        seed: args.seed,
        grid_points: args.numeric.grid_points as usize,
        tol: args.numeric.tol,
        denominator: args.numeric.denominator,
        dims,
        samples: args.samples,
        lambdas: args.lambdas,
        thetas: args.thetas,
        resolution: args.resolution,
        repetitions: args.repetitions,
        frame: args.frame.as_deref().map(read_matrix).transpose()?,
        hamiltonian: args.hamiltonian.as_deref().map(read_matrix).transpose()?,
        threads: args.threads,
        out: args.out.out,
        plot: args.plot,
    };
    execute(&config)
}

#[derive(Deserialize)]
struct Sidecar {
    version: String,
    config: RunConfig,
}

pub fn rerun(args: RerunArgs) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.sidecar)
        .with_context(|| format!("cannot read {}", args.sidecar.display()))?;
    let sidecar: Sidecar =
        serde_json::from_str(&text).with_context(|| format!("cannot parse sidecar {}", args.sidecar.display()))?;
    if sidecar.version != VERSION {
        eprintln!("warning: sidecar written by qsl {}, running {VERSION}", sidecar.version);
    }
    let mut config = sidecar.config;
    if let Some(out) = args.out {
        config.out = out;
    }
    if args.threads.is_some() {
        config.threads = args.threads;
    }
    execute(&config)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SidecarOut<'a, S: Serialize> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config_hash: &'a str,
    config: &'a RunConfig,
    summary: S,
}

struct Outputs<'a> {
    config: &'a RunConfig,
    hash: String,
}

impl Outputs<'_> {
    fn path(&self, ext: &str) -> PathBuf {
        self.config.out.join(format!("{}.{ext}", self.config.experiment.stem()))
    }

    fn write<S: Serialize>(&self, header: &[&str], rows: &[Vec<String>], summary: S, plot: impl FnOnce() -> String) -> anyhow::Result<()> {
        write_csv(&self.path("csv"), self.config.seed, &self.hash, header, rows)?;
        let sidecar = SidecarOut {
            tool: "qsl",
            version: VERSION,
            seed: self.config.seed,
            config_hash: &self.hash,
            config: self.config,
            summary: &summary,
        };
        write_json(&self.path("json"), &sidecar)?;
        if self.config.plot {
            write_text(&self.path("svg"), &plot())?;
        }
        crate::output::print_json(&summary)?;
        eprintln!("wrote {}", self.path("csv").display());
        Ok(())
    }
}

fn execute(config: &RunConfig) -> anyhow::Result<ExitCode> {
    config.validate()?;
    install_tolerance(config.tol)?;
    std::fs::create_dir_all(&config.out).with_context(|| format!("cannot create {}", config.out.display()))?;
    let out = Outputs {
        config,
        hash: config.hash()?,
    };
    let opts = config.options();
    match config.experiment {
        ExperimentName::QubitCurves => {
            let lambdas: Vec<f64> = linspace(0.05, 0.95, config.lambdas)
                .into_iter()
                .filter(|l| (l - 0.5).abs() > 1e-12)
                .collect();
            let thetas = linspace(0.1, std::f64::consts::FRAC_PI_2, config.thetas);
            let (records, summary) = exp_qubit_curves(&lambdas, &thetas, config.seed, &opts)?;
            let rows: Vec<_> = records.iter().map(|r| r.csv_row()).collect();
            out.write(&QUBIT_CSV_HEADER, &rows, &summary, || {
                let theta = *thetas.last().expect("at least two thetas");
                let at = |f: fn(&ExperimentRecord) -> f64| {
                    records
                        .iter()
                        .filter(|r| r.theta == theta)
                        .map(|r| (r.lambda, f(&r.record)))
                        .collect::<Vec<_>>()
                };
                render(
                    &format!("Qubit bounds at theta = {theta:.4}"),
                    "lambda",
                    "bound",
                    &[
                        Series::new("T_Theta", at(|r| r.t_theta), Style::Line),
                        Series::new("T_Phi", at(|r| r.t_phi), Style::Line),
                        Series::new("T_L", at(|r| r.t_l), Style::Line),
                    ],
                )
            })?;
        }
        ExperimentName::QutritSimplex => {
            let (frame, h) = match (&config.frame, &config.hamiltonian) {
                (Some(f), Some(h)) => (f.clone(), h.clone()),
                (f, h) => {
                    let (df, dh) = default_qutrit_setup(config.seed)?;
                    (f.clone().unwrap_or(df), h.clone().unwrap_or(dh))
                }
            };
            let (records, summary) = exp_qutrit_simplex(&frame, &h, config.resolution, &opts)?;
            let rows: Vec<_> = records.iter().map(|r| r.csv_row()).collect();
            out.write(&QUTRIT_CSV_HEADER, &rows, &summary, || {
                let series: Vec<Series> = [Region::Theta, Region::Phi, Region::L]
                    .into_iter()
                    .map(|region| {
                        let pts = records
                            .iter()
                            .filter(|r| r.record.region == region)
                            .map(|r| (r.lambdas[0], r.lambdas[1]))
                            .collect();
                        Series::new(format!("max = T_{}", region.as_str()), pts, Style::Points)
                    })
                    .collect();
                render("Largest bound over the qutrit region", "lambda1", "lambda2", &series)
            })?;
        }
        ExperimentName::TightnessSweep => {
            let (records, summaries) = exp_tightness_sweep(&config.dims, config.samples, config.seed, &opts)?;
            let rows: Vec<_> = records.iter().map(|r| r.sample_csv_row()).collect();
            out.write(&SWEEP_CSV_HEADER, &rows, &summaries, || {
                let series: Vec<Series> = config
                    .dims
                    .iter()
                    .map(|&n| {
                        let pts = records
                            .iter()
                            .filter(|r| r.n == n)
                            .filter_map(|r| r.tightness.map(|t| (r.purity, t)))
                            .collect();
                        Series::new(format!("N = {n}"), pts, Style::Points)
                    })
                    .collect();
                render("Tightness 1 - T_L/max(T_Theta, T_Phi)", "purity", "tightness", &series)
            })?;
        }
        ExperimentName::PurityCorrelation => {
            let (records, summary) = exp_purity_correlation(config.dims[0], config.samples, config.seed, &opts)?;
            let rows: Vec<_> = records.iter().map(|r| r.sample_csv_row()).collect();
            out.write(&SWEEP_CSV_HEADER, &rows, &summary, || {
                let pts = records
                    .iter()
                    .filter_map(|r| r.tightness.map(|t| (1.0 - r.purity, t)))
                    .collect();
                let r = summary.pearson_r.unwrap_or(f64::NAN);
                render(
                    &format!("Tightness against mixedness, r = {r:.3}"),
                    "1 - purity",
                    "tightness",
                    &[Series::new(format!("N = {}", config.dims[0]), pts, Style::Points)],
                )
            })?;
        }
        ExperimentName::ComplexityBench => {
            if config.threads.is_some() {
                eprintln!("note: the benchmark always runs on one thread");
            }
            let cfg = BenchConfig {
                ns: config.dims.clone(),
                batches: config.repetitions,
                ..BenchConfig::default()
            };
            let results = exp_complexity_bench(&cfg, config.seed)?;
            let rows: Vec<_> = results.iter().map(|r| r.csv_row()).collect();
            out.write(&BENCH_CSV_HEADER, &rows, &results, || {
                let pts = results.iter().map(|r| (r.n as f64, r.eta)).collect();
                render("Cost ratio eta = C(L)/C(Theta)", "N", "eta", &[Series::new("eta", pts, Style::Line)])
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_syntax() {
        assert_eq!(parse_dims("3").unwrap(), vec![3]);
        assert_eq!(parse_dims("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_dims("4..40:4").unwrap().len(), 10);
        assert_eq!(parse_dims("3, 5,8").unwrap(), vec![3, 5, 8]);
        assert!(parse_dims("6..3").is_err());
        assert!(parse_dims("a").is_err());
        assert!(parse_dims("3..6:0").is_err());
    }
}
