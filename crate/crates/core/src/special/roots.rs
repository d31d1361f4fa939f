//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Root of `f` in `[lo, hi]` with `f(lo) · f(hi) ≤ 0`.
///
/// Bisection keeps the bracket; each step first tries a secant point and
/// accepts it only when it falls strictly inside the current bracket.
pub fn bracketed_root<T, F>(mut f: F, lo: T, hi: T, ftol: T) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{}, {}]: f = {}, {}",
            to_f64(a),
            to_f64(b),
            to_f64(fa),
            to_f64(fb)
        )));
    }
    let half = lit::<T>(0.5);
    for it in 0..400 {
        let secant = b - fb * (b - a) / (fb - fa);
        let mid = (a + b) * half;
        let x = if it % 3 != 2 && secant > a.min(b) && secant < a.max(b) { secant } else { mid };
        let fx = f(x)?;
        if fx.abs() <= ftol || (b - a).abs() <= T::epsilon() * lit(4.0) * x.abs().max(T::min_positive_value()) {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Ok((a + b) * half)
}

/// Smallest `u = lo·2^k` (with `lo` replaced by 1 when zero) where `pred(u)` holds.
pub fn expand_until<T, P>(start: T, mut pred: P, max_doublings: usize) -> Result<T>
where
    T: Scalar,
    P: FnMut(T) -> Result<bool>,
{
    let mut u = if start > T::zero() { start } else { T::one() };
    for _ in 0..max_doublings {
        if pred(u)? {
            return Ok(u);
        }
        u *= lit(2.0);
    }
    Err(Error::Bracket(format!("upper bracket not found up to {}", to_f64(u))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt2() {
        let r = bracketed_root(|x: f64| Ok(x * x - 2.0), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(matches!(bracketed_root(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-12), Err(Error::Bracket(_))));
    }

    #[test]
    fn doubling() {
        let u = expand_until(0.0f64, |u| Ok(u * u > 50.0), 20).unwrap();
        assert_eq!(u, 8.0);
    }
}
