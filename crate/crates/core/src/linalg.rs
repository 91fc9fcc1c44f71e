//! Dense complex matrices and the Hermitian spectral routines everything else
//! is built on.
//!
//! Matrices are small (N ≤ 64) and dense. Eigendecompositions go through
//! nalgebra's Hermitian solver (Householder tridiagonalization followed by
//! implicit-shift QR); this module owns ordering, validation and the
//! spectral functions built on top of it.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::numerics::NumericsConfig;
use crate::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds an `n × n` matrix from row-major entries.
    pub fn from_row_major(n: usize, entries: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidShape("dimension must be at least 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidShape(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::from_nalgebra(DMatrix::from_row_slice(n, n, &entries))
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidShape(format!(
                "matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidShape("dimension must be at least 1".into()));
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Entry `(i, j)` is `f(i, j)`. The caller guarantees finiteness.
    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(n > 0, "dimension must be at least 1");
        Self(DMatrix::from_fn(n, n, f))
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// The rank-one projector-like matrix `v v†`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `tr[AB]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M†|` entrywise.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// `‖M†M − 𝟙‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.0.adjoint() * &self.0;
        (gram - DMatrix::identity(self.dim(), self.dim()))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self(&u.0 * &self.0 * u.0.adjoint())
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    /// `M v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|k| self.0[(i, k)] * v[k]).sum())
            .collect()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Wire form shared by states and Hamiltonians:
/// `{"n": N, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        let n = m.n;
        let rows_ok = |part: &[Vec<f64>]| part.len() == n && part.iter().all(|r| r.len() == n);
        if !rows_ok(&m.re) || !rows_ok(&m.im) {
            return Err(Error::Parse(format!(
                "\"re\" and \"im\" must both be {n}x{n} arrays"
            )));
        }
        let entries = m
            .re
            .iter()
            .flatten()
            .zip(m.im.iter().flatten())
            .map(|(&re, &im)| C64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(n, entries)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        let n = m.dim();
        let part = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(&m.0[(i, j)])).collect()).collect()
        };
        MatrixJson {
            n,
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }
}

/// `M = V diag(values) V†` with ascending real eigenvalues and unitary `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(f(w)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors.0;
        let mut scaled = v.clone();
        for (j, &w) in self.values.iter().enumerate() {
            let fw = f(w);
            for i in 0..n {
                scaled[(i, j)] *= fw;
            }
        }
        ComplexMatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|w| C64::new(w, 0.0))
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let cfg = NumericsConfig::global();
    let residual = m.hermiticity_residual();
    if residual > cfg.hermitian_tol {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.dim();
    if n == 1 {
        return Ok(EigenDecomposition {
            values: vec![m.0[(0, 0)].re],
            vectors: ComplexMatrix::identity(1),
        });
    }
    let h = m.hermitian_part().0;
    let eig = nalgebra::linalg::SymmetricEigen::try_new(h, f64::EPSILON, cfg.eig_max_iter)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigenDecomposition {
        values,
        vectors: ComplexMatrix(vectors),
    })
}

/// Square roots of eigenvalues, treating anything below solver resolution
/// (or clipped round-off negatives) as an exact zero.
pub(crate) fn resolved_sqrt(values: &[f64]) -> Vec<f64> {
    let scale = values.iter().fold(0.0f64, |a, w| a.max(w.abs()));
    let floor = 8.0 * values.len() as f64 * f64::EPSILON * scale;
    values
        .iter()
        .map(|&w| if w <= floor { 0.0 } else { w.sqrt() })
        .collect()
}

/// The unique PSD square root of a PSD matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.min_value();
    if min < -NumericsConfig::global().psd_tol {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let roots = resolved_sqrt(&eig.values);
    let root_eig = EigenDecomposition {
        values: roots,
        vectors: eig.vectors,
    };
    Ok(root_eig.reconstruct())
}

/// `exp(−iHt)` for one Hermitian `H` at many times, from a single
/// eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    eig: EigenDecomposition,
}

impl SpectralPropagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            eig: hermitian_eig(h)?,
        })
    }

    pub fn from_eig(eig: EigenDecomposition) -> Self {
        Self { eig }
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        self.eig.map(|w| C64::from_polar(1.0, -w * t))
    }
}

/// `U = exp(−iHt)` (ħ = 1).
pub fn hermitian_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(SpectralPropagator::new(h)?.at(t))
}
