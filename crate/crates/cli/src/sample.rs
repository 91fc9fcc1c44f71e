use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{ensure, Context};
use clap::{Args, ValueEnum};
use qsl_core::sampling::{haar_unitary, random_hamiltonian, random_state_fixed_spectrum, random_state_hs, RngStream};
use qsl_core::{ComplexMatrix, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Haar-random unitary.
    Unitary,
    /// Hilbert-Schmidt random density matrix.
    StateHs,
    /// Density matrix with the spectrum given by --spectrum, Haar-random frame.
    StateSpectrum,
    /// GUE Hamiltonian, optionally rescaled to --norm.
    Hamiltonian,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Dimension (inferred from --spectrum for state-spectrum).
    #[arg(long = "n")]
    dim: Option<usize>,
    /// Number of draws.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated eigenvalues summing to one.
    #[arg(long, value_delimiter = ',')]
    spectrum: Option<Vec<f64>>,
    /// Operator norm of sampled Hamiltonians.
    #[arg(long)]
    norm: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn draw(args: &SampleArgs, spectrum: Option<&Spectrum>, n: usize, rng: &mut RngStream) -> anyhow::Result<ComplexMatrix> {
    Ok(match args.kind {
        Kind::Unitary => haar_unitary(n, rng)?,
        Kind::StateHs => random_state_hs(n, rng)?.matrix().clone(),
        Kind::StateSpectrum => random_state_fixed_spectrum(spectrum.expect("checked"), rng)?.matrix().clone(),
        Kind::Hamiltonian => random_hamiltonian(n, rng, args.norm)?,
    })
}

pub fn run(args: SampleArgs) -> anyhow::Result<ExitCode> {
    let spectrum = match (&args.spectrum, args.kind) {
        (Some(values), Kind::StateSpectrum) => Some(Spectrum::new(values.clone()).context("--spectrum")?),
        (None, Kind::StateSpectrum) => anyhow::bail!("state-spectrum needs --spectrum"),
        (Some(_), _) => anyhow::bail!("--spectrum only applies to state-spectrum"),
        (None, _) => None,
    };
    ensure!(args.norm.is_none() || args.kind == Kind::Hamiltonian, "--norm only applies to hamiltonian");
    let n = match (&spectrum, args.dim) {
        (Some(s), Some(n)) => {
            ensure!(n == s.dim(), "--n {n} disagrees with the {} eigenvalues given", s.dim());
            n
        }
        (Some(s), None) => s.dim(),
        (None, Some(n)) => n,
        (None, None) => anyhow::bail!("--n is required"),
    };
    ensure!(n >= 1, "--n must be positive");

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(
            std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    let root = RngStream::new(args.seed, 0);
    for k in 0..args.count {
        let m = draw(&args, spectrum.as_ref(), n, &mut root.derive(k as u64))?;
        serde_json::to_writer(&mut sink, &m)?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(ExitCode::SUCCESS)
}
