//! Scalar abstraction shared by the analytic modules.
//!
//! Every closed-form routine is written against [`Scalar`], so the same code
//! runs in `f32` (fast, loose) and `f64` (the precision the tolerances in the
//! test-suite are calibrated for).

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point type usable throughout the crate.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon as a plain `f64`, used to pick series cut-offs.
    const EPS_F64: f64;
}

impl Scalar for f32 {
    const EPS_F64: f64 = f32::EPSILON as f64;
}

impl Scalar for f64 {
    const EPS_F64: f64 = f64::EPSILON;
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Lossy conversion back to `f64` (for diagnostics and heuristics).
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Shorthand for a complex number with real and imaginary parts.
#[inline]
pub fn cplx<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Real number lifted to the complex plane.
#[inline]
pub fn re<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
