//! Seeded random unitaries, Hamiltonians and states, and the qutrit
//! spectrum grid.

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::state::{DensityMatrix, Spectrum};
use crate::{Error, Result};

/// A reproducible random stream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// An independent child stream. Depends only on this stream's identity
    /// and `index`, never on how much of this stream has been consumed.
    pub fn derive(&self, index: u64) -> RngStream {
        let child_seed = splitmix64(self.seed ^ splitmix64(self.stream_id.wrapping_add(1)));
        RngStream::new(child_seed, index)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension { dim: n, min: 2 });
    }
    Ok(())
}

/// Entries with independent real and imaginary parts of variance 1/2.
fn ginibre(n: usize, rng: &mut RngStream) -> DMatrix<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(s * re, s * im)
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with `R`'s diagonal
/// made positive.
pub fn haar_unitary(n: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    check_dim(n)?;
    let qr = ginibre(n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(q)
}

/// Uniformly distributed unit vector.
pub fn haar_pure_state(n: usize, rng: &mut RngStream) -> Result<Vec<C64>> {
    Ok(haar_unitary(n, rng)?.column(0))
}

/// GUE draw `(G + G†)/2`, optionally rescaled to operator norm `norm`.
pub fn random_hamiltonian(n: usize, rng: &mut RngStream, norm: Option<f64>) -> Result<ComplexMatrix> {
    check_dim(n)?;
    let g = ginibre(n, rng);
    let h = ComplexMatrix::from_nalgebra((&g + g.adjoint()).scale(0.5))?;
    match norm {
        None => Ok(h),
        Some(target) => {
            if !(target.is_finite() && target >= 0.0) {
                return Err(Error::OutOfRange {
                    what: "operator norm",
                    value: target,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
            let eig = hermitian_eig(&h)?;
            let current = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if current == 0.0 {
                return Err(Error::NumericalFailure("zero Hamiltonian draw".into()));
            }
            Ok(h.scale(target / current).hermitian_part())
        }
    }
}

/// Hilbert-Schmidt random state `GG†/tr[GG†]`.
pub fn random_state_hs(n: usize, rng: &mut RngStream) -> Result<DensityMatrix> {
    check_dim(n)?;
    let g = ginibre(n, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(ComplexMatrix::from_nalgebra(w.unscale(tr))?)
}

/// `U diag(Λ) U†` with `U` Haar.
pub fn random_state_fixed_spectrum(spectrum: &Spectrum, rng: &mut RngStream) -> Result<DensityMatrix> {
    let u = haar_unitary(spectrum.dim(), rng)?;
    Ok(DensityMatrix::from_spectrum(spectrum, &u))
}

/// Flat Dirichlet draw on the probability simplex.
fn dirichlet_flat(n: usize, rng: &mut RngStream) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

/// Moves `x` along a straight line so that `Σxᵢ² = p`: toward the uniform
/// vector when `p` is below the current purity, toward the vertex of the
/// largest entry otherwise. Both paths are monotone in purity, so the step
/// is solved in closed form.
fn spectrum_with_purity(x: &[f64], p: f64) -> Vec<f64> {
    let n = x.len() as f64;
    let q: f64 = x.iter().map(|v| v * v).sum();
    if p <= q {
        let s = 1.0 - ((p - 1.0 / n).max(0.0) / (q - 1.0 / n)).sqrt();
        x.iter().map(|v| (1.0 - s) * v + s / n).collect()
    } else {
        let (k, &xk) = x
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty spectrum");
        // Σ((1−s)xᵢ + sδᵢₖ)² = p  ⇔  a s² + b s + c = 0
        let a = q - 2.0 * xk + 1.0;
        let b = 2.0 * (xk - q);
        let c = q - p;
        let s = ((-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a)).clamp(0.0, 1.0);
        x.iter()
            .enumerate()
            .map(|(i, v)| (1.0 - s) * v + if i == k { s } else { 0.0 })
            .collect()
    }
}

/// States with purity uniform on `[1/N, 1]` and Haar eigenframes.
pub fn purity_stratified_states(n: usize, count: usize, rng: &mut RngStream) -> Result<Vec<DensityMatrix>> {
    check_dim(n)?;
    let lo = 1.0 / n as f64;
    (0..count)
        .map(|_| {
            let p = rng.random_range(lo..=1.0);
            let x = dirichlet_flat(n, rng);
            let spectrum = Spectrum::new(spectrum_with_purity(&x, p))?;
            random_state_fixed_spectrum(&spectrum, rng)
        })
        .collect()
}

/// A qutrit spectrum `(λ₁, λ₂, λ₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexPoint {
    pub lambdas: [f64; 3],
}

impl SimplexPoint {
    pub fn new(l1: f64, l2: f64) -> Result<Self> {
        let l3 = 1.0 - l1 - l2;
        if [l1, l2, l3].iter().any(|&v| v.is_nan() || v < -1e-15) {
            return Err(Error::InvalidSpectrum(format!("({l1}, {l2}, {l3}) is not a distribution")));
        }
        Ok(Self {
            lambdas: [l1.max(0.0), l2.max(0.0), l3.max(0.0)],
        })
    }

    pub fn purity(&self) -> f64 {
        self.lambdas.iter().map(|v| v * v).sum()
    }
}

/// Where a grid point sits in region ①.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionEdge {
    Interior,
    /// `λ₁ = λ₂`, from the pure vertex to the center.
    EqualOneTwo,
    /// `λ₁ = λ₃`, from `(1/2, 0, 1/2)` to the center.
    EqualOneThree,
    /// `λ₂ = 0`, from the pure vertex to `(1/2, 0, 1/2)`.
    ZeroTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionGridPoint {
    /// Weight index of the vertex `(1/2, 0, 1/2)`.
    pub i: usize,
    /// Weight index of the center `(1/3, 1/3, 1/3)`.
    pub j: usize,
    pub point: SimplexPoint,
}

impl RegionGridPoint {
    pub fn is_pure_vertex(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    pub fn is_center(&self, resolution: usize) -> bool {
        self.j == resolution
    }

    /// Degenerate edges first; the `λ₂ = 0` edge only when neither applies.
    pub fn edge(&self, resolution: usize) -> RegionEdge {
        if self.i == 0 {
            RegionEdge::EqualOneTwo
        } else if self.i + self.j == resolution {
            RegionEdge::EqualOneThree
        } else if self.j == 0 {
            RegionEdge::ZeroTwo
        } else {
            RegionEdge::Interior
        }
    }
}

/// Uniform barycentric grid on the triangle with vertices `(0,0,1)`,
/// `(1/2,0,1/2)` and `(1/3,1/3,1/3)`, i.e. the chamber `λ₂ ≤ λ₁ ≤ λ₃`.
/// Returns `(R+1)(R+2)/2` points, vertices included.
pub fn qutrit_region1_grid(resolution: usize) -> Result<Vec<RegionGridPoint>> {
    if resolution < 2 {
        return Err(Error::OutOfRange {
            what: "resolution",
            value: resolution as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let r = resolution as f64;
    let mut out = Vec::with_capacity((resolution + 1) * (resolution + 2) / 2);
    for i in 0..=resolution {
        for j in 0..=resolution - i {
            let (b, c) = (i as f64 / r, j as f64 / r);
            let l1 = b / 2.0 + c / 3.0;
            let l2 = c / 3.0;
            out.push(RegionGridPoint {
                i,
                j,
                point: SimplexPoint::new(l1, l2)?,
            });
        }
    }
    Ok(out)
}
