use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Args;
use qsl_core::dynamics::{bounds_partial, HamiltonianSchedule};
use qsl_core::{ComplexMatrix, DensityMatrix};
use serde::Deserialize;

use crate::{install_tolerance, NumericArgs};

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Initial state, as a JSON matrix `{"n", "re", "im"}`.
    #[arg(long)]
    rho: PathBuf,
    /// Target state, same format.
    #[arg(long)]
    sigma: PathBuf,
    /// Hamiltonian: a JSON matrix (needs --time) or a piecewise-constant
    /// schedule `{"segments": [{"duration": t, "hamiltonian": matrix}, …]}`.
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Evolution time for a constant Hamiltonian.
    #[arg(long)]
    time: Option<f64>,
    #[command(flatten)]
    numeric: NumericArgs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    segments: Vec<SegmentFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentFile {
    duration: f64,
    hamiltonian: ComplexMatrix,
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_state(path: &Path, what: &str) -> anyhow::Result<DensityMatrix> {
    let m: ComplexMatrix =
        serde_json::from_str(&read(path)?).with_context(|| format!("{what}: cannot parse {}", path.display()))?;
    DensityMatrix::new(m).with_context(|| format!("{what} ({}) is not a density matrix", path.display()))
}

fn read_schedule(path: &Path, time: Option<f64>) -> anyhow::Result<HamiltonianSchedule> {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("hamiltonian: cannot parse {}", path.display()))?;
    let sched = if value.get("segments").is_some() {
        let file: ScheduleFile = serde_json::from_value(value)
            .with_context(|| format!("hamiltonian: cannot parse schedule {}", path.display()))?;
        let pieces = file.segments.into_iter().map(|g| (g.duration, g.hamiltonian)).collect();
        let sched = HamiltonianSchedule::piecewise(pieces);
        if let (Ok(sched), Some(t)) = (&sched, time) {
            let total = sched.total_duration();
            if (total - t).abs() > 1e-12 * t.abs().max(1.0) {
                bail!("--time {t} disagrees with the schedule's total duration {total}");
            }
        }
        sched
    } else {
        let h: ComplexMatrix = serde_json::from_value(value)
            .with_context(|| format!("hamiltonian: cannot parse {}", path.display()))?;
        let Some(t) = time else {
            bail!("--time is required for a constant Hamiltonian");
        };
        HamiltonianSchedule::constant(h, t)
    };
    sched.with_context(|| format!("hamiltonian ({}) is invalid", path.display()))
}

pub fn run(args: BoundsArgs) -> anyhow::Result<ExitCode> {
    install_tolerance(args.numeric.tol)?;
    let rho = read_state(&args.rho, "rho")?;
    let sigma = read_state(&args.sigma, "sigma")?;
    let sched = read_schedule(&args.hamiltonian, args.time)?;
    let grid = args.numeric.grid_points as usize;
    let report = bounds_partial(&rho, &sigma, &sched, grid, args.numeric.denominator.into())?;
    crate::output::print_json(&report)?;
    if report.iso_spectral {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("warning: states are not iso-spectral; only the Bures-angle bound is reported");
        Ok(ExitCode::from(2))
    }
}
