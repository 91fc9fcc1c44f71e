//! Distances between states: the Bures angle `L`, the generalized Bloch
//! angle `Θ`, the purity-normalized angle `Φ`, and Fubini-Study for pure
//! states.
//!
//! `Θ` and `Φ` are only distances between states with the same spectrum and
//! refuse other pairs. Both are evaluated from `tr[ρσ]` and `tr[ρ²]`; no
//! eigenproblem is solved, unlike the Bures angle.

use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eig, psd_sqrt, resolved_sqrt, ComplexMatrix, C64};
use crate::numerics::{clamped_acos, NumericsConfig};
use crate::state::{check_same_dim, to_bloch, DensityMatrix};
use crate::{Error, Result};

/// A distance in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// Uhlmann root fidelity `tr √(√ρ σ √ρ)`, clamped to `[0, 1]`.
pub fn root_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let root = psd_sqrt(rho.matrix())?;
    let inner = sigma.matrix().conjugate_by(&root).hermitian_part();
    let eig = hermitian_eig(&inner)?;
    let min = eig.min_value();
    if min < -NumericsConfig::global().psd_tol {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let f: f64 = resolved_sqrt(&eig.values).iter().sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `L = arccos F(ρ, σ)`, in `[0, π/2]`.
pub fn bures_angle(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Angle> {
    let f = root_fidelity(rho, sigma)?;
    Ok(Angle(clamped_acos("root fidelity", f, -1.0, 1.0)?))
}

fn require_iso_spectral(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    check_same_dim(rho, sigma)?;
    let dev = rho.spectrum().max_deviation(sigma.spectrum());
    if dev > NumericsConfig::global().iso_spectral_tol {
        return Err(Error::NotIsoSpectral { max_deviation: dev });
    }
    Ok(())
}

/// `tr[ρ²] − 1/N`, erroring when it vanishes.
pub(crate) fn purity_excess(rho: &DensityMatrix) -> Result<f64> {
    let excess = rho.purity() - 1.0 / rho.dim() as f64;
    if excess < NumericsConfig::global().degenerate_tol {
        return Err(Error::MaximallyMixed { excess });
    }
    Ok(excess)
}

/// `Θ = arccos[(tr[ρσ] − 1/N) / (tr[ρ²] − 1/N)]`, in `[0, π]`.
///
/// Evaluated as the equivalent half-angle form
/// `2 atan2(‖ρ − σ‖_F, ‖ρ + σ − 2𝟙/N‖_F)`, which keeps full precision
/// near `0` and `π` where arccos does not.
pub fn theta_angle(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Angle> {
    require_iso_spectral(rho, sigma)?;
    purity_excess(rho)?;
    let n = rho.dim();
    let diff = (rho.matrix() - sigma.matrix()).frobenius_norm();
    let shift = ComplexMatrix::identity(n).scale(2.0 / n as f64);
    let sum = (&(rho.matrix() + sigma.matrix()) - &shift).frobenius_norm();
    Ok(Angle(2.0 * diff.atan2(sum)))
}

/// The arccos form of [`theta_angle`], as written.
pub fn theta_angle_arccos(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Angle> {
    require_iso_spectral(rho, sigma)?;
    let excess = purity_excess(rho)?;
    let x = (rho.overlap(sigma) - 1.0 / rho.dim() as f64) / excess;
    Ok(Angle(clamped_acos("cos Θ", x, -1.0, 1.0)?))
}

/// `Θ = ∠(r̂, ŝ)` through explicit Bloch vectors, as
/// `2 atan2(‖r̂ − ŝ‖, ‖r̂ + ŝ‖)`. Same value as [`theta_angle`]; kept as an
/// independent route.
pub fn theta_angle_bloch(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Angle> {
    require_iso_spectral(rho, sigma)?;
    purity_excess(rho)?;
    let r = to_bloch(rho).normalized();
    let s = to_bloch(sigma).normalized();
    match (r, s) {
        (Some(r), Some(s)) => {
            let (mut d, mut p) = (0.0f64, 0.0f64);
            for (a, b) in r.coords.iter().zip(&s.coords) {
                d += (a - b) * (a - b);
                p += (a + b) * (a + b);
            }
            Ok(Angle(2.0 * d.sqrt().atan2(p.sqrt())))
        }
        _ => Err(Error::MaximallyMixed { excess: 0.0 }),
    }
}

/// `Φ = arccos √(tr[ρσ] / tr[ρ²])`, in `[0, π/2]`.
pub fn phi_angle(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Angle> {
    require_iso_spectral(rho, sigma)?;
    let ratio = rho.overlap(sigma) / rho.purity();
    let slack = NumericsConfig::global().arccos_slack;
    if !(-slack..=1.0 + slack).contains(&ratio) {
        return Err(Error::OutOfRange {
            what: "tr[ρσ]/tr[ρ²]",
            value: ratio,
            lo: 0.0,
            hi: 1.0,
        });
    }
    // cos Φ = √(tr[ρσ]/tr[ρ²]) and, for iso-spectral pairs,
    // sin Φ = ‖ρ − σ‖_F / √(2 tr[ρ²]); atan2 avoids arccos near 1.
    let diff = (rho.matrix() - sigma.matrix()).frobenius_norm();
    let cos = (rho.overlap(sigma).max(0.0)).sqrt();
    Ok(Angle((diff / std::f64::consts::SQRT_2).atan2(cos)))
}

/// `arccos |⟨ψ|φ⟩|` for unit vectors.
pub fn fubini_study(psi: &[C64], phi: &[C64]) -> Result<Angle> {
    if psi.len() != phi.len() {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: phi.len(),
        });
    }
    let tol = NumericsConfig::global().normalization_tol;
    for v in [psi, phi] {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
    }
    let overlap: C64 = psi.iter().zip(phi).map(|(a, b)| a.conj() * b).sum();
    Ok(Angle(clamped_acos("|⟨ψ|φ⟩|", overlap.norm(), 0.0, 1.0)?))
}
