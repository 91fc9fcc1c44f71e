//! `qsl`: speed-limit bounds, random sampling and the numerical experiments
//! from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsl_core::dynamics::{BuresDenominator, DEFAULT_GRID_POINTS};
use qsl_core::NumericsConfig;

mod bounds;
mod experiment;
mod output;
mod sample;

#[derive(Debug, Parser)]
#[command(name = "qsl", version, about = "Quantum speed limits for mixed states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute all bounds for driving RHO to SIGMA under a Hamiltonian.
    ///
    /// Prints a JSON report. Exit code 0 on success, 2 when the states are
    /// not iso-spectral (only the Bures bound is reported), 1 on error.
    Bounds(bounds::BoundsArgs),
    /// Run one of the numerical experiments and write CSV, a JSON sidecar
    /// and optionally an SVG plot.
    Experiment(experiment::ExperimentArgs),
    /// Re-run an experiment from the JSON sidecar of an earlier run.
    Rerun(experiment::RerunArgs),
    /// Draw random matrices and write them as JSON lines.
    Sample(sample::SampleArgs),
}

/// Options shared by commands that evaluate bounds.
#[derive(Debug, Clone, Args)]
pub struct NumericArgs {
    /// Grid points per Hamiltonian segment for the time averages.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS as u64, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid_points: u64,
    /// Input validation tolerance (Hermiticity, trace and iso-spectrality).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Denominator of the Bures-angle bound.
    #[arg(long, value_enum, default_value_t = Denominator::StdDev)]
    pub denominator: Denominator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// Energy standard deviation ΔE.
    StdDev,
    /// min(E, ΔE); not a valid bound in general.
    MinEnergy,
}

impl From<Denominator> for BuresDenominator {
    fn from(d: Denominator) -> Self {
        match d {
            Denominator::StdDev => BuresDenominator::StdDev,
            Denominator::MinEnergy => BuresDenominator::MinEnergyStdDev,
        }
    }
}

/// Installs the process-wide tolerances; must run before any computation.
pub fn install_tolerance(tol: Option<f64>) -> anyhow::Result<()> {
    if let Some(tol) = tol {
        anyhow::ensure!(tol.is_finite() && tol > 0.0, "--tol must be a positive number, got {tol}");
        let cfg = NumericsConfig {
            hermitian_tol: tol,
            trace_tol: tol,
            iso_spectral_tol: tol,
            ..NumericsConfig::default()
        };
        NumericsConfig::install(cfg).map_err(|_| anyhow::anyhow!("tolerances already installed"))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let kind = c
            .downcast_ref::<std::io::Error>()
            .map(|io| io.kind())
            .or_else(|| c.downcast_ref::<serde_json::Error>().and_then(|j| j.io_error_kind()));
        kind == Some(std::io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    // Usage errors exit 1; 2 is reserved for partial results.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Bounds(args) => bounds::run(args),
        Command::Experiment(args) => experiment::run(args),
        Command::Rerun(args) => experiment::rerun(args),
        Command::Sample(args) => sample::run(args),
    };
    match result {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
