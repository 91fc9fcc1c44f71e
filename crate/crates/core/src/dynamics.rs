//! Unitary propagation, the speed functionals and the three speed limits.
//!
//! Along `ρ_t = U_t ρ U_t†` the instantaneous speeds are
//!
//! ```text
//! Q_Θ(t) = √( 2 tr[ρ_t²H_t² − (ρ_tH_t)²] / (tr[ρ_t²] − 1/N) )
//! Q_Φ(t) = √(   tr[ρ_t²H_t² − (ρ_tH_t)²] /  tr[ρ_t²] )
//! ΔE(t)  = √( tr[ρ_tH_t²] − tr[ρ_tH_t]² )
//! E(t)   = tr[ρ_tH_t] − h_t⁽⁰⁾
//! ```
//!
//! and each bound is a distance divided by the time average of its speed.
//! The commutator term is evaluated as `½‖[ρ, H]‖_F²`, which is the same
//! quantity without the cancellation.

use serde::{Serialize, Serializer};

use crate::linalg::{hermitian_eig, ComplexMatrix, EigenDecomposition, SpectralPropagator, C64};
use crate::metrics::{bures_angle, phi_angle, theta_angle};
use crate::numerics::{clamped_acos, NumericsConfig};
use crate::state::{check_same_dim, DensityMatrix};
use crate::table::{fmt, fmt_opt};
use crate::{Error, Result};

/// Grid points per segment used when none is given.
pub const DEFAULT_GRID_POINTS: usize = 257;

/// One constant piece of a schedule.
#[derive(Debug, Clone)]
pub struct Segment {
    duration: f64,
    hamiltonian: ComplexMatrix,
    eig: EigenDecomposition,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    /// Smallest eigenvalue `h⁽⁰⁾` of the segment Hamiltonian.
    pub fn ground_energy(&self) -> f64 {
        self.eig.min_value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    PiecewiseConstant,
}

/// Piecewise-constant Hamiltonian `H_t`.
#[derive(Debug, Clone)]
pub struct HamiltonianSchedule {
    dim: usize,
    segments: Vec<Segment>,
}

impl HamiltonianSchedule {
    pub fn constant(h: ComplexMatrix, duration: f64) -> Result<Self> {
        Self::piecewise(vec![(duration, h)])
    }

    pub fn piecewise(pieces: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let dim = match pieces.first() {
            Some((_, h)) => h.dim(),
            None => return Err(Error::InvalidSchedule("no segments".into())),
        };
        let segments = pieces
            .into_iter()
            .map(|(duration, hamiltonian)| {
                if !(duration.is_finite() && duration > 0.0) {
                    return Err(Error::InvalidSchedule(format!(
                        "segment duration must be positive, got {duration}"
                    )));
                }
                if hamiltonian.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        left: dim,
                        right: hamiltonian.dim(),
                    });
                }
                let eig = hermitian_eig(&hamiltonian)?;
                Ok(Segment {
                    duration,
                    hamiltonian: hamiltonian.hermitian_part(),
                    eig,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim, segments })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ScheduleKind {
        if self.segments.len() == 1 {
            ScheduleKind::Constant
        } else {
            ScheduleKind::PiecewiseConstant
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }
}

/// Trajectory over one schedule segment on a uniform grid, endpoints included.
#[derive(Debug, Clone)]
pub struct PathSegment {
    pub segment: usize,
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Cumulative propagators `U_t` from time 0.
    pub unitaries: Vec<ComplexMatrix>,
}

/// Discretized `ρ_t = U_t ρ U_t†`. Adjacent segments share their boundary
/// time, so the flattened time list is non-decreasing.
#[derive(Debug, Clone)]
pub struct EvolutionPath {
    segments: Vec<PathSegment>,
}

impl EvolutionPath {
    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn initial_state(&self) -> &DensityMatrix {
        &self.segments[0].states[0]
    }

    pub fn final_state(&self) -> &DensityMatrix {
        let last = self.segments.last().expect("paths are never empty");
        last.states.last().expect("segments hold at least two points")
    }

    pub fn final_unitary(&self) -> &ComplexMatrix {
        let last = self.segments.last().expect("paths are never empty");
        last.unitaries.last().expect("segments hold at least two points")
    }

    /// `(t, ρ_t, U_t)` for every grid point, in order.
    pub fn points(&self) -> impl Iterator<Item = (f64, &DensityMatrix, &ComplexMatrix)> {
        self.segments.iter().flat_map(|s| {
            s.times
                .iter()
                .zip(&s.states)
                .zip(&s.unitaries)
                .map(|((&t, rho), u)| (t, rho, u))
        })
    }

    pub fn len(&self) -> usize {
        self.segments.iter().map(|s| s.times.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Propagates `ρ0` exactly through each constant segment, sampling
/// `grid_points` uniformly spaced times per segment.
pub fn evolve(
    rho0: &DensityMatrix,
    sched: &HamiltonianSchedule,
    grid_points: usize,
) -> Result<EvolutionPath> {
    if rho0.dim() != sched.dim() {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: sched.dim(),
        });
    }
    if grid_points < 2 {
        return Err(Error::InvalidSchedule(format!(
            "need at least 2 grid points per segment, got {grid_points}"
        )));
    }
    let mut start_u = ComplexMatrix::identity(rho0.dim());
    let mut start_t = 0.0;
    let mut segments = Vec::with_capacity(sched.segments.len());
    for (index, seg) in sched.segments.iter().enumerate() {
        let prop = SpectralPropagator::from_eig(seg.eig.clone());
        let mut times = Vec::with_capacity(grid_points);
        let mut states = Vec::with_capacity(grid_points);
        let mut unitaries = Vec::with_capacity(grid_points);
        for j in 0..grid_points {
            let tau = if j + 1 == grid_points {
                seg.duration
            } else {
                seg.duration * j as f64 / (grid_points - 1) as f64
            };
            let u = if j == 0 { start_u.clone() } else { &prop.at(tau) * &start_u };
            times.push(start_t + tau);
            states.push(rho0.conjugated(&u));
            unitaries.push(u);
        }
        start_u = unitaries.last().cloned().expect("grid_points >= 2");
        start_t += seg.duration;
        segments.push(PathSegment {
            segment: index,
            times,
            states,
            unitaries,
        });
    }
    Ok(EvolutionPath { segments })
}

/// Instantaneous speeds at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpeedSample {
    pub t: f64,
    pub segment: usize,
    pub q_theta: f64,
    pub q_phi: f64,
    pub delta_e: f64,
    pub mean_e: f64,
}

#[derive(Debug, Clone, Copy)]
struct RawSpeed {
    t: f64,
    segment: usize,
    q_theta: Option<f64>,
    q_phi: f64,
    delta_e: f64,
    mean_e: f64,
}

/// `tr[ρ²H² − (ρH)²] = ½‖[ρ, H]‖_F²`.
pub fn commutator_term(rho: &ComplexMatrix, h: &ComplexMatrix) -> f64 {
    let norm = rho.commutator(h).frobenius_norm();
    0.5 * norm * norm
}

/// Energy standard deviation `√(tr[ρH²] − tr[ρH]²)`.
pub fn energy_std_dev(rho: &ComplexMatrix, h: &ComplexMatrix) -> f64 {
    let rho_h = rho * h;
    let mean = rho_h.trace().re;
    let second = rho_h.trace_product(h).re;
    (second - mean * mean).max(0.0).sqrt()
}

fn raw_speed(t: f64, segment: usize, rho: &DensityMatrix, seg: &Segment) -> RawSpeed {
    let n = rho.dim() as f64;
    let h = &seg.hamiltonian;
    let m = rho.matrix();
    let comm = commutator_term(m, h);
    let purity = rho.purity();
    let excess = purity - 1.0 / n;
    let q_theta = (excess >= NumericsConfig::global().degenerate_tol)
        .then(|| (2.0 * comm / excess).sqrt());
    let rho_h = m * h;
    let mean = rho_h.trace().re;
    let second = rho_h.trace_product(h).re;
    RawSpeed {
        t,
        segment,
        q_theta,
        q_phi: (comm / purity).sqrt(),
        delta_e: (second - mean * mean).max(0.0).sqrt(),
        mean_e: (mean - seg.ground_energy()).max(0.0),
    }
}

fn raw_speeds(path: &EvolutionPath, sched: &HamiltonianSchedule) -> Result<Vec<RawSpeed>> {
    if path.initial_state().dim() != sched.dim() {
        return Err(Error::DimensionMismatch {
            left: path.initial_state().dim(),
            right: sched.dim(),
        });
    }
    if path.segments.len() != sched.segments.len() {
        return Err(Error::InvalidSchedule(format!(
            "path has {} segments, schedule has {}",
            path.segments.len(),
            sched.segments.len()
        )));
    }
    Ok(path
        .segments
        .iter()
        .flat_map(|ps| {
            let seg = &sched.segments[ps.segment];
            ps.times
                .iter()
                .zip(&ps.states)
                .map(move |(&t, rho)| raw_speed(t, ps.segment, rho, seg))
        })
        .collect())
}

/// The four integrands at every grid point of `path`.
pub fn speed_samples(path: &EvolutionPath, sched: &HamiltonianSchedule) -> Result<Vec<SpeedSample>> {
    raw_speeds(path, sched)?
        .into_iter()
        .map(|r| {
            let q_theta = r.q_theta.ok_or_else(|| {
                let rho = path.initial_state();
                Error::MaximallyMixed {
                    excess: rho.purity() - 1.0 / rho.dim() as f64,
                }
            })?;
            Ok(SpeedSample {
                t: r.t,
                segment: r.segment,
                q_theta,
                q_phi: r.q_phi,
                delta_e: r.delta_e,
                mean_e: r.mean_e,
            })
        })
        .collect()
}

/// Time averages `(1/T)∫₀ᵀ … dt` of the speed functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpeedAverages {
    pub q_theta: f64,
    pub q_phi: f64,
    pub delta_e: f64,
    pub mean_e: f64,
}

/// Composite trapezoid per segment, summed and divided by the total time.
fn trapezoid_mean<S>(
    samples: &[S],
    total: f64,
    time: impl Fn(&S) -> f64,
    segment: impl Fn(&S) -> usize,
    value: impl Fn(&S) -> f64,
) -> f64 {
    let mut integral = 0.0;
    for pair in samples.windows(2) {
        if segment(&pair[0]) == segment(&pair[1]) {
            let dt = time(&pair[1]) - time(&pair[0]);
            integral += 0.5 * dt * (value(&pair[0]) + value(&pair[1]));
        }
    }
    integral / total
}

pub fn time_average(samples: &[SpeedSample], sched: &HamiltonianSchedule) -> Result<SpeedAverages> {
    if samples.len() < 2 {
        return Err(Error::InvalidSchedule(format!(
            "need at least 2 samples to average, got {}",
            samples.len()
        )));
    }
    let total = sched.total_duration();
    let avg = |f: fn(&SpeedSample) -> f64| trapezoid_mean(samples, total, |s| s.t, |s| s.segment, f);
    Ok(SpeedAverages {
        q_theta: avg(|s| s.q_theta),
        q_phi: avg(|s| s.q_phi),
        delta_e: avg(|s| s.delta_e),
        mean_e: avg(|s| s.mean_e),
    })
}

/// Denominator of the Bures-angle bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuresDenominator {
    /// `ΔE` (Mandelstam-Tamm).
    #[default]
    StdDev,
    /// `min(E, ΔE)`. Not a valid bound for general non-orthogonal targets;
    /// `L/E` can exceed the true evolution time.
    MinEnergyStdDev,
}

/// A speed-limit time, or `Unbounded` when the speed vanishes while the
/// distance does not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    /// `distance / speed`, with a vanishing speed handled explicitly.
    pub fn from_ratio(distance: f64, speed: f64) -> Bound {
        let cfg = NumericsConfig::global();
        if speed > cfg.degenerate_tol {
            Bound::Finite(distance / speed)
        } else if distance <= cfg.zero_distance_tol {
            Bound::Finite(0.0)
        } else {
            Bound::Unbounded
        }
    }

    /// The bound as a number, `+∞` when unbounded.
    pub fn value(self) -> f64 {
        match self {
            Bound::Finite(v) => v,
            Bound::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Bound::Unbounded)
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => s.serialize_f64(*v),
            Bound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// Distances, averaged speeds and all bounds for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(rename = "actualT")]
    pub actual_t: f64,
    #[serde(rename = "isoSpectral")]
    pub iso_spectral: bool,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "Theta")]
    pub theta: Option<f64>,
    #[serde(rename = "Phi")]
    pub phi: Option<f64>,
    #[serde(rename = "qTheta")]
    pub q_theta: Option<f64>,
    #[serde(rename = "qPhi")]
    pub q_phi: f64,
    #[serde(rename = "deltaE")]
    pub delta_e: f64,
    #[serde(rename = "meanE")]
    pub mean_e: f64,
    pub denominator: BuresDenominator,
    #[serde(rename = "qLDenom")]
    pub q_l_denom: f64,
    #[serde(rename = "tL")]
    pub t_l: Bound,
    #[serde(rename = "tTheta")]
    pub t_theta: Option<Bound>,
    #[serde(rename = "tPhi")]
    pub t_phi: Option<Bound>,
    #[serde(rename = "tUnified")]
    pub t_unified: Bound,
}

impl BoundReport {
    pub const CSV_HEADER: [&'static str; 12] = [
        "N", "T", "L", "Theta", "Phi", "Q_L_denom", "Q_Theta", "Q_Phi", "tL", "tTheta", "tPhi",
        "tUnified",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        let bound = |b: Option<Bound>| fmt_opt(b.map(Bound::value));
        vec![
            self.dim.to_string(),
            fmt(self.actual_t),
            fmt(self.l),
            fmt_opt(self.theta),
            fmt_opt(self.phi),
            fmt(self.q_l_denom),
            fmt_opt(self.q_theta),
            fmt(self.q_phi),
            fmt(self.t_l.value()),
            bound(self.t_theta),
            bound(self.t_phi),
            fmt(self.t_unified.value()),
        ]
    }

    /// `(tL, tTheta, tPhi)` as numbers; missing parts are NaN.
    pub fn times(&self) -> (f64, f64, f64) {
        let v = |b: Option<Bound>| b.map_or(f64::NAN, Bound::value);
        (self.t_l.value(), v(self.t_theta), v(self.t_phi))
    }
}

/// All bounds for driving `rho` to `sigma` under `sched`. Requires the pair
/// to be iso-spectral and `rho` not maximally mixed.
pub fn bounds(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    sched: &HamiltonianSchedule,
    grid_points: usize,
) -> Result<BoundReport> {
    bounds_with(rho, sigma, sched, grid_points, BuresDenominator::default())
}

pub fn bounds_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    sched: &HamiltonianSchedule,
    grid_points: usize,
    denominator: BuresDenominator,
) -> Result<BoundReport> {
    check_same_dim(rho, sigma)?;
    let dev = rho.spectrum().max_deviation(sigma.spectrum());
    if dev > NumericsConfig::global().iso_spectral_tol {
        return Err(Error::NotIsoSpectral { max_deviation: dev });
    }
    crate::metrics::purity_excess(rho)?;
    bounds_partial(rho, sigma, sched, grid_points, denominator)
}

/// Like [`bounds_with`], but a non-iso-spectral pair (or a maximally mixed
/// `rho`) leaves the `Θ`/`Φ` parts empty instead of failing.
pub fn bounds_partial(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    sched: &HamiltonianSchedule,
    grid_points: usize,
    denominator: BuresDenominator,
) -> Result<BoundReport> {
    check_same_dim(rho, sigma)?;
    let path = evolve(rho, sched, grid_points)?;
    let raw = raw_speeds(&path, sched)?;
    let total = sched.total_duration();
    let avg = |f: &dyn Fn(&RawSpeed) -> f64| trapezoid_mean(&raw, total, |s| s.t, |s| s.segment, f);

    let q_theta = raw
        .iter()
        .all(|r| r.q_theta.is_some())
        .then(|| avg(&|r| r.q_theta.unwrap_or(0.0)));
    let q_phi = avg(&|r| r.q_phi);
    let delta_e = avg(&|r| r.delta_e);
    let mean_e = avg(&|r| r.mean_e);
    let q_l_denom = match denominator {
        BuresDenominator::StdDev => delta_e,
        BuresDenominator::MinEnergyStdDev => delta_e.min(mean_e),
    };

    let l = bures_angle(rho, sigma)?.radians();
    let t_l = Bound::from_ratio(l, q_l_denom);

    let (theta, phi) = match (theta_angle(rho, sigma), phi_angle(rho, sigma)) {
        (theta, Ok(phi)) => {
            let theta = match theta {
                Ok(a) => Some(a.radians()),
                Err(Error::MaximallyMixed { .. }) => None,
                Err(e) => return Err(e),
            };
            (theta, Some(phi.radians()))
        }
        (_, Err(Error::NotIsoSpectral { .. })) => (None, None),
        (_, Err(e)) => return Err(e),
    };
    let t_theta = theta.zip(q_theta).map(|(d, q)| Bound::from_ratio(d, q));
    let t_phi = phi.map(|d| Bound::from_ratio(d, q_phi));
    let t_unified = [Some(t_l), t_theta, t_phi]
        .into_iter()
        .flatten()
        .fold(Bound::Finite(0.0), |acc, b| match (acc, b) {
            (Bound::Unbounded, _) | (_, Bound::Unbounded) => Bound::Unbounded,
            (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(a.max(b)),
        });

    Ok(BoundReport {
        dim: rho.dim(),
        actual_t: total,
        iso_spectral: phi.is_some(),
        l,
        theta,
        phi,
        q_theta,
        q_phi,
        delta_e,
        mean_e,
        denominator,
        q_l_denom,
        t_l,
        t_theta,
        t_phi,
        t_unified,
    })
}

/// Closed-form qubit bounds `(T_Θ, T_Φ, T_L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QubitBounds {
    pub t_theta: f64,
    pub t_phi: f64,
    pub t_l: f64,
}

fn check_qubit_domain(theta: f64, lambda: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::DomainError(format!("theta = {theta} outside [0, pi/2]")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::DomainError(format!("lambda = {lambda} outside [0, 1]")));
    }
    if lambda == 0.5 {
        return Err(Error::DomainError("lambda = 1/2 is the maximally mixed state".into()));
    }
    Ok(1.0 - 2.0 * lambda)
}

/// Bounds for `ρ = λ|r₁⟩⟨r₁| + (1−λ)|r₂⟩⟨r₂|` driven by
/// `H = e^{iφ}|r₁⟩⟨r₂| + h.c.` to the iso-spectral state whose first
/// eigenvector is at Fubini-Study distance `θ` from `|r₁⟩`. Independent of
/// `φ`. With `k = 1 − 2λ`:
///
/// ```text
/// T_Θ = θ
/// T_Φ = arccos√((1 + k²cos2θ)/(1 + k²)) · √((1 + k²)/(2k²))
/// T_L = arccos(F₊ + F₋),  F± = ½√(1 + k²cos2θ ± 2k cosθ √(1 − k²sin²θ))
/// ```
///
/// (`E = ΔE = 1` for this Hamiltonian, so `T_L` needs no denominator.)
pub fn qubit_analytic_bounds(theta: f64, lambda: f64) -> Result<QubitBounds> {
    let k = check_qubit_domain(theta, lambda)?;
    let k2 = k * k;
    let (s, c, c2) = (theta.sin(), theta.cos(), (2.0 * theta).cos());

    let cos_phi = ((1.0 + k2 * c2) / (1.0 + k2)).max(0.0).sqrt();
    let phi = clamped_acos("cos Φ", cos_phi, 0.0, 1.0)?;
    let q_phi = (2.0 * k2 / (1.0 + k2)).sqrt();

    let root = (1.0 - k2 * s * s).max(0.0).sqrt();
    let f_plus = 0.5 * (1.0 + k2 * c2 + 2.0 * k * c * root).max(0.0).sqrt();
    let f_minus = 0.5 * (1.0 + k2 * c2 - 2.0 * k * c * root).max(0.0).sqrt();
    let t_l = clamped_acos("F+ + F-", f_plus + f_minus, -1.0, 1.0)?;

    Ok(QubitBounds {
        t_theta: theta,
        t_phi: phi / q_phi,
        t_l,
    })
}

/// The `T_Φ` closed form with `(1 − k²)` in place of `(1 + k²)`. Kept only to
/// show that it disagrees with the numerical pipeline; NaN where the
/// square-root arguments go negative or the result is undefined.
pub fn qubit_phi_bound_one_minus_k2(theta: f64, lambda: f64) -> f64 {
    let k2 = (1.0 - 2.0 * lambda).powi(2);
    let arg = ((1.0 + k2 * (2.0 * theta).cos()) / (1.0 - k2)).sqrt();
    arg.acos() * ((1.0 - k2) / (2.0 * k2)).sqrt()
}

/// The qubit family behind [`qubit_analytic_bounds`]: `ρ = diag(λ, 1−λ)`,
/// `H = e^{iφ}|0⟩⟨1| + h.c.` held for time `θ`.
pub fn qubit_instance(theta: f64, lambda: f64, phase: f64) -> Result<(DensityMatrix, HamiltonianSchedule)> {
    check_qubit_domain(theta, lambda)?;
    let rho = DensityMatrix::diagonal(&[lambda, 1.0 - lambda])?;
    let zero = C64::new(0.0, 0.0);
    let e = C64::from_polar(1.0, phase);
    let h = ComplexMatrix::from_row_major(2, vec![zero, e, e.conj(), zero])?;
    Ok((rho, HamiltonianSchedule::constant(h, theta)?))
}

/// Full numerical pipeline on [`qubit_instance`], with `σ` the endpoint.
pub fn qubit_numeric_bounds(theta: f64, lambda: f64, phase: f64, grid_points: usize) -> Result<BoundReport> {
    let (rho, sched) = qubit_instance(theta, lambda, phase)?;
    let path = evolve(&rho, &sched, grid_points)?;
    bounds(&rho, path.final_state(), &sched, grid_points)
}
