//! Quantum speed limits for unitary evolution of mixed states.
//!
//! Three lower bounds on the time needed to drive a state `ρ` into an
//! iso-spectral state `σ` under a Hamiltonian `H_t`:
//!
//! - `T_L = L / ΔE`, from the Bures angle `L = arccos tr√(√ρ σ √ρ)`;
//! - `T_Θ = Θ / Q_Θ`, from the angle `Θ` between generalized Bloch vectors;
//! - `T_Φ = Φ / Q_Φ`, from the purity-normalized overlap angle `Φ`.
//!
//! `T_Θ` and `T_Φ` only need traces of products of `ρ`, `σ` and `H`, whereas
//! `T_L` needs matrix square roots. The [`experiments`] module reproduces the
//! qubit curves, the qutrit simplex study, Monte-Carlo tightness sweeps and a
//! complexity benchmark comparing the two routes.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod metrics;
pub mod numerics;
pub mod sampling;
pub mod state;
pub mod table;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, C64};
pub use numerics::NumericsConfig;
pub use state::{BlochVector, DensityMatrix, GeneratorBasis, Spectrum};
