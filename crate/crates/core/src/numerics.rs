//! Tolerances shared by every module.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Numerical tolerances. One process-wide instance is read through
/// [`NumericsConfig::global`]; it can be replaced once, before first use,
/// with [`NumericsConfig::install`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericsConfig {
    /// Max entrywise `|M - M†|` accepted as Hermitian.
    pub hermitian_tol: f64,
    /// Allowed deviation of `tr ρ` from 1.
    pub trace_tol: f64,
    /// Eigenvalues in `[-psd_tol, 0)` are clipped to zero; below is an error.
    pub psd_tol: f64,
    /// Entrywise tolerance on sorted spectra for iso-spectrality.
    pub iso_spectral_tol: f64,
    /// Denominators at or below this are treated as zero.
    pub degenerate_tol: f64,
    /// How far an `arccos` argument may leave its interval before it is an error.
    pub arccos_slack: f64,
    /// Allowed deviation of a state vector's norm from 1.
    pub normalization_tol: f64,
    /// Distances at or below this count as zero when a bound's denominator vanishes.
    pub zero_distance_tol: f64,
    /// Iteration cap for the Hermitian eigensolver (0 = unlimited).
    pub eig_max_iter: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-9,
            trace_tol: 1e-9,
            psd_tol: 1e-10,
            iso_spectral_tol: 1e-8,
            degenerate_tol: 1e-12,
            arccos_slack: 1e-6,
            normalization_tol: 1e-9,
            zero_distance_tol: 1e-7,
            eig_max_iter: 10_000,
        }
    }
}

static GLOBAL: OnceLock<NumericsConfig> = OnceLock::new();

impl NumericsConfig {
    pub fn global() -> &'static NumericsConfig {
        GLOBAL.get_or_init(NumericsConfig::default)
    }

    /// Installs `config` as the process-wide configuration. Fails (returning
    /// the rejected value) if the global was already read or installed.
    pub fn install(config: NumericsConfig) -> Result<(), NumericsConfig> {
        GLOBAL.set(config)
    }
}

/// `arccos(x)` after clamping `x` into `[lo, hi]`; errors if `x` is further
/// than the configured slack outside the interval.
pub(crate) fn clamped_acos(what: &'static str, x: f64, lo: f64, hi: f64) -> crate::Result<f64> {
    let slack = NumericsConfig::global().arccos_slack;
    if !x.is_finite() || x < lo - slack || x > hi + slack {
        return Err(crate::Error::OutOfRange {
            what,
            value: x,
            lo,
            hi,
        });
    }
    Ok(x.clamp(lo, hi).acos())
}
