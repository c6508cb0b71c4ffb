//! Scalar abstraction for the state-vector kernel.
//!
//! The kernel (`StateVector`, `DensityMatrix`, operator words, circuit
//! simulation) is written against [`Real`] so it can run in `f32` or `f64`.
//! The protocol layers above it are pinned to `f64`: their tolerances
//! (1e-10 orthonormality, 1e-12 probability sums) are below `f32` resolution.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable as the real part of an amplitude.
pub trait Real:
    Float + FromPrimitive + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant (tolerances, angles).
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a [`Real`] scalar.
pub type Amp<T> = Complex<T>;

pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}
