//! Modified Bessel function of the second kind with complex order.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, re, Scalar};

/// `K_ν(x) = ∫_0^∞ exp(-x cosh u) cosh(νu) du` for real `x > 0`, complex `ν`.
pub fn bessel_k<T: Scalar>(nu: Complex<T>, x: T) -> Result<Complex<T>> {
    if !(x > T::zero()) {
        return Err(Error::Domain(format!("K_ν needs x > 0, got {x}")));
    }
    let h = lit::<T>(0.02);
    let nr = nu.re.abs();
    let mut acc = re(lit::<T>(0.5) * (-x).exp());
    let mut k = 1usize;
    loop {
        let u = h * lit(k as f64);
        let lw = -x * u.cosh();
        let term = ((nu * u).exp() + (-nu * u).exp()) * lit::<T>(0.5) * lw.exp();
        acc += term;
        // the real part of ν governs growth of cosh(νu)
        if lw + nr * u < lit(-40.0) {
            break;
        }
        k += 1;
    }
    Ok(acc * h)
}
