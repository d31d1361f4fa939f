//! One-parameter Mittag-Leffler function `E_α(x) = Σ x^n / Γ(αn + 1)`.

use super::gamma::ln_gamma;
use super::quadrature::{exp_sinh, tanh_sinh};
use super::AccuracyReport;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Series is used up to this `|x|` (when it is numerically safe).
pub const SERIES_SWITCH: f64 = 5.0;

const TOL: f64 = 1e-13;

/// `E_α(x)` for `α ∈ (0, 1]`.
pub fn mittag_leffler<T: Scalar>(alpha: T, x: T) -> Result<AccuracyReport<T>> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::Domain(format!("Mittag-Leffler index must lie in (0,1], got {alpha}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain("Mittag-Leffler argument must be finite".into()));
    }
    if alpha == T::one() {
        return Ok(AccuracyReport::new(x.exp(), T::EPS_F64 * to_f64(x.exp())));
    }
    if x == T::zero() {
        return Ok(AccuracyReport::exact(T::one()));
    }
    if x > T::zero() || (to_f64(x.abs()) <= SERIES_SWITCH && series_is_stable(alpha, x)) {
        return series(alpha, x);
    }
    integral(alpha, -x)
}

fn series_is_stable<T: Scalar>(alpha: T, x: T) -> bool {
    // Largest term magnitude bounds the cancellation error.
    let a = to_f64(alpha);
    let lx = to_f64(x.abs()).ln();
    let mut biggest = 0.0f64;
    for n in 0..400 {
        let lt = n as f64 * lx - ln_gamma(a * n as f64 + 1.0).unwrap_or(f64::INFINITY);
        biggest = biggest.max(lt);
        if lt < biggest - 40.0 {
            break;
        }
    }
    biggest < 4.0 * std::f64::consts::LN_10
}

fn series<T: Scalar>(alpha: T, x: T) -> Result<AccuracyReport<T>> {
    let mut sum = T::zero();
    let mut abs_sum = T::zero();
    let lx = x.abs().ln();
    let neg = x < T::zero();
    let mut n = 0u32;
    loop {
        let nn = lit::<T>(n as f64);
        let mag = (nn * lx - ln_gamma(alpha * nn + T::one())?).exp();
        let term = if neg && n % 2 == 1 { -mag } else { mag };
        sum += term;
        abs_sum += mag;
        if n > 2 && mag <= abs_sum * lit(T::EPS_F64 * 0.01) {
            break;
        }
        n += 1;
        if n > 5000 {
            return Err(Error::NoConvergence {
                what: "Mittag-Leffler series".into(),
                achieved: to_f64(mag),
                target: T::EPS_F64,
            });
        }
    }
    let err = to_f64(abs_sum) * T::EPS_F64 * 4.0;
    Ok(AccuracyReport::new(sum, err))
}

/// `E_α(-t) = sin(απ)/(απ) ∫_0^∞ exp(-(t u)^{1/α}) / (u² + 2u cos(απ) + 1) du`.
fn integral<T: Scalar>(alpha: T, t: T) -> Result<AccuracyReport<T>> {
    let pi = T::PI();
    let c = (alpha * pi).cos();
    let pref = (alpha * pi).sin() / (alpha * pi);
    let inv_a = T::one() / alpha;
    let g = move |u: T| -> T {
        let d = u * u + lit::<T>(2.0) * u * c + T::one();
        (-(t * u).powf(inv_a)).exp() / d
    };
    // Split at the peak of the kernel (sharp when α is close to 1).
    let split = if c < T::zero() { -c } else { T::one() };
    let left = tanh_sinh(g, T::zero(), split, TOL)?;
    let right = exp_sinh(g, split, TOL)?;
    Ok(AccuracyReport::new(
        pref * (left.value + right.value),
        to_f64(pref.abs()) * (left.abs_error + right.abs_error) + 4.0 * T::EPS_F64,
    ))
}

/// Leading large-`t` asymptotic `E_α(-t) ≈ 1 / (Γ(1 - α) t)`.
pub fn mittag_leffler_asymptotic<T: Scalar>(alpha: T, t: T) -> Result<T> {
    Ok(T::one() / (super::gamma::gamma(T::one() - alpha)? * t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(mittag_leffler(0.3, 0.0).unwrap().value, 1.0);
        assert!((mittag_leffler(1.0, -1.0).unwrap().value - (-1f64).exp()).abs() < 1e-15);
        // e·erfc(1)
        let v = mittag_leffler(0.5f64, -1.0).unwrap().value;
        assert!((v - 0.427_583_576_155_807).abs() < 1e-12, "{v}");
    }

    #[test]
    fn both_routes_agree() {
        for &a in &[0.3, 0.5, 0.8, 0.95] {
            for &x in &[1.5, 4.0, 5.0] {
                let s = series::<f64>(a, -x).unwrap();
                let i = integral::<f64>(a, x).unwrap();
                if s.abs_error < 1e-12 {
                    assert!((s.value - i.value).abs() < 1e-10, "α={a} x={x}: {} vs {}", s.value, i.value);
                }
            }
        }
    }

    #[test]
    fn half_closed_form_large_argument() {
        // E_{1/2}(-x) = exp(x²) erfc(x); at x = 10 ≈ 0.0561409927
        let v = mittag_leffler(0.5f64, -10.0).unwrap();
        assert!((v.value - 0.056_140_992_743_822_6).abs() < 1e-10, "{}", v.value);
    }

    #[test]
    fn asymptotic_cross_check() {
        for &a in &[0.3, 0.5, 0.8] {
            let t = 200.0;
            let v: f64 = mittag_leffler(a, -t).unwrap().value;
            let asy = mittag_leffler_asymptotic(a, t).unwrap();
            assert!((v / asy - 1.0).abs() < 0.05, "α={a}: {v} vs {asy}");
        }
    }

    #[test]
    fn completely_monotone_grid() {
        for &a in &[0.3, 0.5, 0.8] {
            let xs: Vec<f64> = (0..60).map(|i| i as f64 * 0.25).collect();
            let v: Vec<f64> = xs.iter().map(|&x| mittag_leffler(a, -x).unwrap().value).collect();
            for i in 1..v.len() - 1 {
                assert!(v[i] < v[i - 1]);
                assert!(v[i + 1] - 2.0 * v[i] + v[i - 1] > -1e-10);
            }
        }
    }
}
