//! Trapezoidal quadrature of `(1/2πi) ∫ g(z) dz` along a vertical line.

use num_complex::Complex;

use super::AccuracyReport;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Truncated vertical contour `Re z = abscissa`, `|Im z| ≤ half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinLine<T> {
    pub abscissa: T,
    pub half_width: T,
    pub nodes: usize,
}

impl<T: Scalar> MellinLine<T> {
    pub fn new(abscissa: T, half_width: T, nodes: usize) -> Result<Self> {
        if !(half_width > T::zero()) {
            return Err(Error::Domain("contour half-width must be positive".into()));
        }
        if nodes < 64 || !nodes.is_multiple_of(2) {
            return Err(Error::Domain(format!("contour needs an even node count >= 64, got {nodes}")));
        }
        Ok(Self { abscissa, half_width, nodes })
    }
}

/// Exponential decay envelope `|g(a + ib)| ≤ C exp(-rate |b|)` for the truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEnvelope {
    pub rate: f64,
}

/// Result of a line integral: the value, its error estimate and the imaginary residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntegral<T> {
    pub report: AccuracyReport<T>,
    pub imag_residual: f64,
}

/// `(1/2πi) ∫_{a-iB}^{a+iB} g(z) dz = (1/2π) ∫_{-B}^{B} g(a + ib) db`.
///
/// The error estimate combines the difference to the half-node rule and a
/// truncation bound: `|g(a ± iB)| / rate` from the envelope, or the edge
/// values times `B` when no envelope is available.
pub fn mellin_barnes_integrate<T, G>(g: G, line: &MellinLine<T>, envelope: Option<DecayEnvelope>) -> Result<LineIntegral<T>>
where
    T: Scalar,
    G: Fn(Complex<T>) -> Result<Complex<T>>,
{
    let n = line.nodes;
    let h = line.half_width * lit(2.0) / lit(n as f64);
    let mut full = Complex::new(T::zero(), T::zero());
    let mut coarse = Complex::new(T::zero(), T::zero());
    let mut edge = 0.0f64;
    for k in 0..=n {
        let b = -line.half_width + h * lit(k as f64);
        let v = g(Complex::new(line.abscissa, b))?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Domain(format!("integrand not finite at Im z = {b}")));
        }
        let w = if k == 0 || k == n { lit::<T>(0.5) } else { T::one() };
        full += v * w;
        if k % 2 == 0 {
            let wc = if k == 0 || k == n { lit::<T>(0.5) } else { T::one() };
            coarse += v * wc;
        }
        if k == 0 || k == n {
            edge = edge.max(to_f64(v.norm()));
        }
    }
    let scale = T::one() / (T::PI() * lit(2.0));
    let val: Complex<T> = full * h * scale;
    let val_coarse: Complex<T> = coarse * h * lit::<T>(2.0) * scale;
    let disc = to_f64((val - val_coarse).norm());
    let trunc = match envelope {
        Some(env) if env.rate > 0.0 => 2.0 * edge / env.rate / (2.0 * std::f64::consts::PI),
        _ => 2.0 * edge * to_f64(line.half_width) / (2.0 * std::f64::consts::PI),
    };
    Ok(LineIntegral {
        report: AccuracyReport::new(val.re, disc + trunc),
        imag_residual: to_f64(val.im.abs()),
    })
}
