//! Density matrices, spectra and the generalized Bloch representation
//!
//! ```text
//! ρ = (1/N) (𝟙 + √(N(N−1)/2) r·A),   tr[A_i A_j] = 2 δ_ij
//! ```
//!
//! where `A` is the generalized Gell-Mann basis of su(N).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::numerics::NumericsConfig;
use crate::{Error, Result};

/// Eigenvalues of a state, sorted descending, each in `[0, 1]`, summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts descending and clips round-off negatives (down to `-psd_tol`).
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        let cfg = NumericsConfig::global();
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty".into()));
        }
        for v in values.iter_mut() {
            if !v.is_finite() || *v < -cfg.psd_tol || *v > 1.0 + cfg.trace_tol {
                return Err(Error::InvalidSpectrum(format!("eigenvalue {v} outside [0, 1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > cfg.trace_tol {
            return Err(Error::InvalidSpectrum(format!("eigenvalues sum to {sum}, not 1")));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    /// `(1, 0, …, 0)`.
    pub fn pure(n: usize) -> Self {
        let mut values = vec![0.0; n];
        values[0] = 1.0;
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn purity(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Largest entrywise difference between two sorted spectra.
    pub fn max_deviation(&self, other: &Spectrum) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A Hermitian, PSD, unit-trace matrix together with its spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    spectrum: Spectrum,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let cfg = NumericsConfig::global();
        let residual = mat.hermiticity_residual();
        if residual > cfg.hermitian_tol {
            return Err(Error::NotHermitian { residual });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > cfg.trace_tol || tr.im.abs() > cfg.trace_tol {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        let mat = mat.hermitian_part();
        let eig = hermitian_eig(&mat)?;
        let min = eig.min_value();
        if min < -cfg.psd_tol {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let spectrum = Spectrum::new(eig.values)?;
        Ok(Self { mat, spectrum })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(n).scale(1.0 / n as f64),
            spectrum: Spectrum {
                values: vec![1.0 / n as f64; n],
            },
        }
    }

    /// `|ψ⟩⟨ψ|` for a unit vector `ψ`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NumericsConfig::global().normalization_tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            mat: ComplexMatrix::outer(psi),
            spectrum: Spectrum::pure(psi.len()),
        })
    }

    /// `diag(p)` in the computational basis.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let spectrum = Spectrum::new(probs.to_vec())?;
        Ok(Self {
            mat: ComplexMatrix::from_real_diagonal(probs),
            spectrum,
        })
    }

    /// `V diag(Λ) V†` for a unitary frame `V`; the spectrum is carried over
    /// exactly rather than recomputed.
    pub fn from_spectrum(spectrum: &Spectrum, frame: &ComplexMatrix) -> Self {
        debug_assert_eq!(spectrum.dim(), frame.dim());
        debug_assert!(frame.unitarity_residual() < 1e-8);
        let diag = ComplexMatrix::from_real_diagonal(spectrum.values());
        Self {
            mat: diag.conjugate_by(frame).hermitian_part(),
            spectrum: spectrum.clone(),
        }
    }

    /// `U ρ U†` for unitary `U`, keeping the cached spectrum.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        debug_assert!(u.unitarity_residual() < 1e-8);
        Self {
            mat: self.mat.conjugate_by(u).hermitian_part(),
            spectrum: self.spectrum.clone(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).re
    }

    /// `tr[ρσ]`.
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        self.mat.trace_product(&other.mat).re
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(rho: DensityMatrix) -> Self {
        rho.mat
    }
}

/// `tr[ρ²]`, in `[1/N, 1]`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Whether the sorted spectra agree entrywise to `tol`.
pub fn iso_spectral(rho: &DensityMatrix, sigma: &DensityMatrix, tol: f64) -> Result<bool> {
    check_same_dim(rho, sigma)?;
    Ok(rho.spectrum.max_deviation(&sigma.spectrum) <= tol)
}

pub(crate) fn check_same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    Ok(())
}

/// The `N² − 1` generalized Gell-Mann matrices: symmetric pairs `(j<k)`,
/// then antisymmetric pairs, then the `N − 1` diagonal ones.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBasis {
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

impl GeneratorBasis {
    fn build(n: usize) -> Self {
        let zero = C64::new(0.0, 0.0);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
            .collect();
        let mut ops = Vec::with_capacity(n * n - 1);
        for &(j, k) in &pairs {
            ops.push(ComplexMatrix::from_fn(n, |a, b| {
                if (a, b) == (j, k) || (a, b) == (k, j) {
                    C64::new(1.0, 0.0)
                } else {
                    zero
                }
            }));
        }
        for &(j, k) in &pairs {
            ops.push(ComplexMatrix::from_fn(n, |a, b| {
                if (a, b) == (j, k) {
                    C64::new(0.0, -1.0)
                } else if (a, b) == (k, j) {
                    C64::new(0.0, 1.0)
                } else {
                    zero
                }
            }));
        }
        for l in 1..n {
            let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
            let diag: Vec<f64> = (0..n)
                .map(|m| match m.cmp(&l) {
                    std::cmp::Ordering::Less => norm,
                    std::cmp::Ordering::Equal => -(l as f64) * norm,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect();
            ops.push(ComplexMatrix::from_real_diagonal(&diag));
        }
        Self { dim: n, ops }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Generalized Gell-Mann basis of su(N), memoized per `N`.
pub fn generator_basis(n: usize) -> Result<Arc<GeneratorBasis>> {
    if n < 2 {
        return Err(Error::InvalidDimension { dim: n, min: 2 });
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GeneratorBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Ok(guard
        .entry(n)
        .or_insert_with(|| Arc::new(GeneratorBasis::build(n)))
        .clone())
}

/// Real coherence vector of a state in the generalized Gell-Mann basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    /// `r / ‖r‖`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<BlochVector> {
        let norm = self.norm();
        (norm > 0.0).then(|| BlochVector {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c / norm).collect(),
        })
    }
}

/// `r_i = √(N / (2(N−1))) tr[ρ A_i]`.
pub fn to_bloch(rho: &DensityMatrix) -> BlochVector {
    let n = rho.dim();
    let basis = generator_basis(n).expect("density matrices have dimension >= 2");
    let scale = (n as f64 / (2.0 * (n as f64 - 1.0))).sqrt();
    let coords = basis
        .ops()
        .iter()
        .map(|a| scale * rho.matrix().trace_product(a).re)
        .collect();
    BlochVector { dim: n, coords }
}

/// Inverse of [`to_bloch`]. Positivity is checked: for `N > 2` a vector with
/// `‖r‖ ≤ 1` need not describe a state.
pub fn from_bloch(r: &BlochVector) -> Result<DensityMatrix> {
    let n = r.dim;
    let basis = generator_basis(n)?;
    if r.coords.len() != basis.len() {
        return Err(Error::InvalidShape(format!(
            "Bloch vector for N={n} needs {} coordinates, got {}",
            basis.len(),
            r.coords.len()
        )));
    }
    let scale = (n as f64 * (n as f64 - 1.0) / 2.0).sqrt();
    let mut acc = ComplexMatrix::identity(n);
    for (c, a) in r.coords.iter().zip(basis.ops()) {
        acc = &acc + &a.scale(scale * c);
    }
    DensityMatrix::new(acc.scale(1.0 / n as f64)).map_err(|e| match e {
        Error::NotPsd { min_eigenvalue } => Error::NotAState { min_eigenvalue },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn basis_n2_is_pauli() {
        let b = generator_basis(2).unwrap();
        let i = C64::new(0.0, 1.0);
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let x = ComplexMatrix::from_row_major(2, vec![o, one, one, o]).unwrap();
        let y = ComplexMatrix::from_row_major(2, vec![o, -i, i, o]).unwrap();
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert_eq!(b.ops(), &[x, y, z]);
    }

    #[test]
    fn basis_n3_is_gell_mann() {
        let b = generator_basis(3).unwrap();
        assert_eq!(b.len(), 8);
        // λ_8 = diag(1, 1, −2)/√3 is the last element.
        let l8 = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -2.0]).scale(1.0 / 3f64.sqrt());
        assert!(b.ops()[7].max_abs_diff(&l8) < 1e-15);
        // λ_3 = diag(1, −1, 0).
        assert!(b.ops()[6].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn basis_is_orthonormal_and_traceless() {
        for n in 2..=7 {
            let b = generator_basis(n).unwrap();
            assert_eq!(b.len(), n * n - 1);
            for (i, a) in b.ops().iter().enumerate() {
                assert!(a.trace().norm() <= 1e-10);
                assert!(a.is_hermitian(0.0));
                for (j, c) in b.ops().iter().enumerate() {
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!((a.trace_product(c) - C64::new(want, 0.0)).norm() <= 1e-9);
                }
            }
        }
        assert!(matches!(generator_basis(1), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn bloch_examples() {
        let r = to_bloch(&DensityMatrix::maximally_mixed(4));
        assert!(r.coords.iter().all(|c| c.abs() < 1e-15));

        let r = to_bloch(&DensityMatrix::diagonal(&[0.25, 0.75]).unwrap());
        assert!(close(r.coords[0], 0.0, 1e-15) && close(r.coords[1], 0.0, 1e-15));
        assert!(close(r.coords[2], -0.5, 1e-15));

        let s = 0.5f64.sqrt();
        let plus_i = [C64::new(s, 0.0), C64::new(0.0, s)];
        assert!(close(to_bloch(&DensityMatrix::pure(&plus_i).unwrap()).norm(), 1.0, 1e-12));

        let zero = BlochVector { dim: 3, coords: vec![0.0; 8] };
        let rho = from_bloch(&zero).unwrap();
        assert!(rho.matrix().max_abs_diff(DensityMatrix::maximally_mixed(3).matrix()) < 1e-15);

        let north = BlochVector { dim: 2, coords: vec![0.0, 0.0, 1.0] };
        let rho = from_bloch(&north).unwrap();
        assert!(rho.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn from_bloch_checks_positivity() {
        // +λ_8 = diag(1, 1, −2)/√3 at unit length gives diag(2, 2, −1)/3;
        // the opposite direction is the pure state diag(0, 0, 1).
        let mut coords = vec![0.0; 8];
        coords[7] = 1.0;
        let r = BlochVector { dim: 3, coords };
        assert!(matches!(from_bloch(&r), Err(Error::NotAState { .. })));
        let short = BlochVector { dim: 3, coords: vec![0.0; 3] };
        assert!(matches!(from_bloch(&short), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn purity_examples() {
        assert!(close(purity(&DensityMatrix::maximally_mixed(5)), 0.2, 1e-15));
        assert!(close(purity(&DensityMatrix::diagonal(&[0.25, 0.75]).unwrap()), 0.625, 1e-15));
        let e1 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(close(purity(&DensityMatrix::pure(&e1).unwrap()), 1.0, 1e-15));
    }

    #[test]
    fn iso_spectral_examples() {
        let a = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let b = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let c = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
        assert!(iso_spectral(&a, &b, 1e-8).unwrap());
        assert!(!iso_spectral(&a, &c, 1e-8).unwrap());
        let d = DensityMatrix::maximally_mixed(3);
        assert!(matches!(iso_spectral(&a, &d, 1e-8), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn density_matrix_validation() {
        let o = C64::new(0.0, 0.0);
        let bad_trace = ComplexMatrix::from_real_diagonal(&[0.5, 0.6]);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidTrace { .. })));
        let negative = ComplexMatrix::from_real_diagonal(&[1.2, -0.2]);
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPsd { .. })));
        let skew = ComplexMatrix::from_row_major(
            2,
            vec![C64::new(0.5, 0.0), C64::new(0.1, 0.0), o, C64::new(0.5, 0.0)],
        )
        .unwrap();
        assert!(matches!(DensityMatrix::new(skew), Err(Error::NotHermitian { .. })));
        let roundoff = ComplexMatrix::from_real_diagonal(&[1.0 + 5e-11, -5e-11]);
        let rho = DensityMatrix::new(roundoff).unwrap();
        assert_eq!(rho.spectrum().values()[1], 0.0);
    }

    #[test]
    fn spectrum_sorted_descending() {
        let s = Spectrum::new(vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(s.values(), &[0.5, 0.3, 0.2]);
        assert!(Spectrum::new(vec![0.5, 0.6]).is_err());
        assert!(Spectrum::new(vec![1.5, -0.5]).is_err());
    }
}
