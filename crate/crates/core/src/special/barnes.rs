//! Double gamma function `G_τ`, the log-convex solution of
//! `G_τ(u + 1) = Γ(u/τ) G_τ(u)` normalized by `G_τ(1) = 1`.
//!
//! `log G_τ` is an indefinite sum of `f(u) = log Γ(u/τ)`. For large `Re w`
//! the Euler-Maclaurin formula gives
//! `log G_τ(w) = C + τ Λ(w/τ) - f(w)/2 + Σ_j B_2j/(2j)! f^{(2j-1)}(w)`
//! with `Λ' = log Γ` taken from the Stirling series. The constant cancels
//! after shifting both `z` and `1` by the same integer.

use num_complex::Complex;

use super::gamma::{log_gamma, polygamma, BERNOULLI_EVEN};
use crate::error::{Error, Result};
use crate::scalar::{lit, re, Scalar};

const EM_TERMS: usize = 8;

/// Asymptotic antiderivative of `log Γ(v)`, without constant.
fn log_gamma_antiderivative<T: Scalar>(v: Complex<T>) -> Complex<T> {
    let half = lit::<T>(0.5);
    let lv = v.ln();
    let ln_2pi = (T::PI() * lit(2.0)).ln();
    let v2 = v * v;
    let mut out = (v2 * half - v * half) * lv - v2 * lit::<T>(0.75) + v * half + v * (ln_2pi * half)
        + lv * lit::<T>(1.0 / 12.0);
    let inv2 = (v * v).inv();
    let mut p = inv2;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().skip(1).take(10) {
        let kk = (k + 1) as f64;
        let c = b / (2.0 * kk * (2.0 * kk - 1.0) * (2.0 - 2.0 * kk));
        out += p * lit::<T>(c);
        p *= inv2;
    }
    out
}

/// Euler-Maclaurin approximation of `log G_τ(w)` up to an additive constant.
fn em_tail<T: Scalar>(w: Complex<T>, tau: T) -> Result<Complex<T>> {
    let v = w / tau;
    let mut out = log_gamma_antiderivative(v) * tau - log_gamma(v)? * lit::<T>(0.5);
    let mut fact = 1.0f64;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate().take(EM_TERMS) {
        let n = 2 * (j as u32) + 2;
        fact *= ((n - 1) * n) as f64;
        // f^{(2j-1)}(w) = τ^{-(2j-1)} ψ^{(2j-2)}(w/τ)
        let deriv = polygamma(n - 2, v)? * tau.powi(-(n as i32 - 1));
        out += deriv * lit::<T>(b / fact);
    }
    Ok(out)
}

/// `log G_τ(z)` for `Re z > 0`.
pub fn log_barnes_g<T: Scalar>(z: Complex<T>, tau: T) -> Result<Complex<T>> {
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::Domain(format!("Barnes G needs τ > 0, got {tau}")));
    }
    if !(z.re > T::zero()) {
        return Err(Error::Domain(format!("Barnes G needs Re z > 0, got {}", z.re)));
    }
    let one = re(T::one());
    if z == one {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let target = lit::<T>(30.0) * tau.max(T::one()) + z.im.abs();
    let mut n = 0usize;
    while lit::<T>(n as f64) + z.re.min(T::one()) < target {
        n += 1;
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in 0..n {
        let kk = lit::<T>(k as f64);
        acc += log_gamma((z + kk) / tau)? - log_gamma((one + kk) / tau)?;
    }
    let shift = lit::<T>(n as f64);
    Ok(em_tail(z + shift, tau)? - em_tail(one + shift, tau)? - acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(log_barnes_g(c(1.0, 0.0), 0.7).unwrap(), c(0.0, 0.0));
        assert!(log_barnes_g(c(2.0, 0.0), 1.0).unwrap().norm() < 1e-12);
        assert!(log_barnes_g(c(3.0, 0.0), 1.0).unwrap().norm() < 1e-12);
        assert!((log_barnes_g(c(4.0, 0.0), 1.0).unwrap() - c(2f64.ln(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn classical_barnes_value() {
        // G(1/2) for the classical Barnes function (τ = 1).
        let g_half = 0.603_244_281_209_446_1f64;
        assert!((log_barnes_g(c(0.5, 0.0), 1.0).unwrap().re - g_half.ln()).abs() < 1e-11);
    }

    #[test]
    fn first_recurrence() {
        for &tau in &[0.5, 1.0 / 1.2, 1.0 / 1.6, 2.0] {
            for &(x, y) in &[(0.3, 0.0), (1.7, 2.0), (4.2, -6.0), (7.9, 9.5)] {
                let u = c(x, y);
                let lhs = log_barnes_g(u + 1.0, tau).unwrap();
                let rhs = log_gamma(u / tau).unwrap() + log_barnes_g(u, tau).unwrap();
                let d = (lhs - rhs).exp() - 1.0;
                assert!(d.norm() < 1e-10, "τ={tau} u={u}: {d}");
            }
        }
    }

    #[test]
    fn second_recurrence() {
        for &tau in &[0.5, 1.0 / 1.6, 1.5] {
            for &(x, y) in &[(0.4, 0.0), (2.5, 1.0), (5.0, -3.0)] {
                let z = c(x, y);
                let lhs = log_barnes_g(z + tau, tau).unwrap();
                let rhs = (2.0 * std::f64::consts::PI).ln() * (tau - 1.0) / 2.0
                    + (-z + 0.5) * tau.ln()
                    + log_gamma(z).unwrap()
                    + log_barnes_g(z, tau).unwrap();
                let d = (lhs - rhs).exp() - 1.0;
                assert!(d.norm() < 1e-10, "τ={tau} z={z}: {d}");
            }
        }
    }

    #[test]
    fn domain() {
        assert!(log_barnes_g(c(0.0, 1.0), 1.0).is_err());
        assert!(log_barnes_g(c(1.0, 0.0), -1.0).is_err());
    }
}
