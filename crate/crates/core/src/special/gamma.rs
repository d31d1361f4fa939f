//! Complex log-gamma and polygamma functions.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cplx, lit, re, Scalar};

/// Even Bernoulli numbers `B_2, B_4, ..., B_30`.
pub(crate) const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

const SHIFT_TO: f64 = 15.0;
const STIRLING_TERMS: usize = 12;

fn is_nonpositive_integer<T: Scalar>(z: Complex<T>) -> bool {
    z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round()
}

/// `log Γ(z)` with `Im` continuous in `z` away from the negative real axis.
pub fn log_gamma<T: Scalar>(z: Complex<T>) -> Result<Complex<T>> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(crate::scalar::to_f64(z.re)));
    }
    if z.re < lit(0.5) {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let pi = T::PI();
        let w = cplx(z.re * pi, z.im * pi);
        return Ok(re(pi.ln()) - log_sin(w) - log_gamma_right(Complex::new(T::one(), T::zero()) - z));
    }
    Ok(log_gamma_right(z))
}

/// `Γ(z)` for complex `z`.
pub fn gamma_complex<T: Scalar>(z: Complex<T>) -> Result<Complex<T>> {
    Ok(log_gamma(z)?.exp())
}

/// `log sin(w)` without overflow for large `|Im w|`.
fn log_sin<T: Scalar>(w: Complex<T>) -> Complex<T> {
    let i = Complex::<T>::i();
    let half = lit::<T>(0.5);
    if w.im >= T::zero() {
        // sin w = e^{-iw} (1 - e^{2iw}) i/2
        let e = (i * w * lit::<T>(2.0)).exp();
        -i * w + (re(T::one()) - e).ln() + cplx(half.ln(), T::FRAC_PI_2())
    } else {
        log_sin(w.conj()).conj()
    }
}

fn log_gamma_right<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let mut z = z;
    let mut acc = Complex::new(T::zero(), T::zero());
    let lim = lit::<T>(SHIFT_TO);
    while z.norm() < lim {
        acc -= z.ln();
        z += T::one();
    }
    acc + stirling(z)
}

fn stirling<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let half = lit::<T>(0.5);
    let ln_2pi = (T::PI() * lit(2.0)).ln();
    let mut out = (z - half) * z.ln() - z + re(ln_2pi * half);
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut p = inv;
    let eps = lit::<T>(T::EPS_F64 * 0.1);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(STIRLING_TERMS) {
        let n = (2 * k + 2) as f64;
        let term = p * lit::<T>(b / (n * (n - 1.0)));
        out += term;
        if term.norm() < eps * out.norm() {
            break;
        }
        p *= inv2;
    }
    out
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma<T: Scalar>(x: T) -> Result<T> {
    if x <= T::zero() {
        return Err(Error::Domain(format!("ln_gamma expects x > 0, got {x}")));
    }
    Ok(log_gamma_right(re(x)).re)
}

/// `Γ(x)` for real `x` off the poles.
pub fn gamma<T: Scalar>(x: T) -> Result<T> {
    if x > T::zero() {
        return Ok(log_gamma_right(re(x)).re.exp());
    }
    if x == x.round() {
        return Err(Error::Pole(crate::scalar::to_f64(x)));
    }
    let pi = T::PI();
    Ok(pi / ((pi * x).sin() * gamma(T::one() - x)?))
}

/// Polygamma `ψ^{(m)}(z)` (digamma for `m = 0`), `z` off the nonpositive integers.
pub fn polygamma<T: Scalar>(m: u32, z: Complex<T>) -> Result<Complex<T>> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(crate::scalar::to_f64(z.re)));
    }
    if z.re < lit(0.5) && m == 0 {
        // ψ(1-z) - ψ(z) = π cot(πz)
        let pi = T::PI();
        let w = z * pi;
        let cot = w.cos() / w.sin();
        return Ok(polygamma(0, re(T::one()) - z)? - cot * pi);
    }
    let mut z = z;
    let mut acc = Complex::new(T::zero(), T::zero());
    let mf: T = factorial(m);
    // (-1)^{m+1}
    let sign = if m.is_multiple_of(2) { -T::one() } else { T::one() };
    let lim = lit::<T>(SHIFT_TO + 5.0 + 2.0 * m as f64);
    // ψ^{(m)}(z) = ψ^{(m)}(z+1) + (-1)^{m+1} m! / z^{m+1}
    while z.norm() < lim || z.re < T::zero() {
        acc += z.powi(-(m as i32 + 1)) * (mf * sign);
        z += T::one();
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let eps = lit::<T>(T::EPS_F64 * 0.1);
    let out = if m == 0 {
        let mut s = z.ln() - inv * lit::<T>(0.5);
        let mut p = inv2;
        for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
            let n = (2 * k + 2) as f64;
            let term = p * lit::<T>(b / n);
            s -= term;
            if term.norm() < eps * s.norm() {
                break;
            }
            p *= inv2;
        }
        s
    } else {
        let mm = m as f64;
        // (-1)^{m+1} [ (m-1)!/z^m + m!/(2 z^{m+1}) + Σ B_2k (2k+m-1)!/((2k)! z^{2k+m}) ]
        let mut s: Complex<T> = inv.powi(m as i32) * factorial::<T>(m - 1) + inv.powi(m as i32 + 1) * (mf * lit(0.5));
        let mut p = inv.powi(m as i32 + 2);
        let mut ratio = 1.0; // (2k+m-1)!/((2k)! (m-1)!) built incrementally
        let base = factorial::<T>(m - 1);
        for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
            let kk = (k + 1) as f64;
            ratio *= (2.0 * kk + mm - 2.0) * (2.0 * kk + mm - 1.0) / ((2.0 * kk - 1.0) * (2.0 * kk));
            let term = p * (base * lit(b * ratio));
            s += term;
            if term.norm() < eps * s.norm() {
                break;
            }
            p *= inv2;
        }
        s * sign
    };
    Ok(acc + out)
}

fn factorial<T: Scalar>(m: u32) -> T {
    (1..=m).fold(T::one(), |a, k| a * lit::<T>(k as f64))
}

/// `log(Γ(a)/Γ(b))` for complex arguments, computed in log space.
pub fn log_gamma_ratio<T: Scalar>(a: Complex<T>, b: Complex<T>) -> Result<Complex<T>> {
    Ok(log_gamma(a)? - log_gamma(b)?)
}
