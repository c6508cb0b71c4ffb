//! Dense state-vector kernel plus the protocol machinery used to re-derive
//! and audit seven-qubit teleportation and state-sharing schemes.
//!
//! The kernel types are generic over [`scalar::Real`]; the aliases at the
//! crate root fix them to `f64`, which is what the protocol layers use.

pub mod channel;
pub mod config;
pub mod datafile;
pub mod density;
pub mod engine;
pub mod entanglement;
mod error;
pub mod ket;
pub mod linalg;
pub mod operator;
pub mod protocols;
pub mod scalar;
pub mod state;
pub mod statefile;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use operator::{Letter, LocalOperatorWord, Phase};

/// Double-precision amplitude.
pub type Amplitude = num_complex::Complex<f64>;
/// Double-precision state vector.
pub type StateVector = state::StateVector<f64>;
/// Double-precision density matrix.
pub type DensityMatrix = density::DensityMatrix<f64>;
pub type Projection = state::Projection<f64>;
