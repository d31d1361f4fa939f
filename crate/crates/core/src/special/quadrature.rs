//! Double-exponential quadrature on finite and half-infinite intervals.

use super::AccuracyReport;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

const MAX_LEVEL: usize = 8;

fn finite_or_zero<T: Scalar>(v: T) -> T {
    if v.is_finite() {
        v
    } else {
        T::zero()
    }
}

/// `∫_a^b f(x) dx` by tanh-sinh with step halving until two levels agree to `tol`.
pub fn tanh_sinh<T: Scalar, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: f64) -> Result<AccuracyReport<T>> {
    if a == b {
        return Ok(AccuracyReport::exact(T::zero()));
    }
    if b < a {
        let r = tanh_sinh(f, b, a, tol)?;
        return Ok(AccuracyReport::new(-r.value, r.abs_error));
    }
    let c = (a + b) * lit(0.5);
    let half = (b - a) * lit(0.5);
    let pi2 = T::FRAC_PI_2();
    let tmax = lit::<T>(4.0);
    let mut h = T::one();
    let node = |t: T| -> (T, T, T) {
        let s = pi2 * t.sinh();
        let ch = s.cosh();
        let w = pi2 * t.cosh() / (ch * ch);
        // 1 - tanh(s) computed without cancellation
        let comp = T::one() / (ch * ch * (T::one() + s.tanh().abs()));
        (s.tanh(), w, comp)
    };
    let eval = |f: &mut F, t: T| -> T {
        let (x, w, comp) = node(t);
        let xx = if x > T::zero() {
            b - half * comp
        } else if x < T::zero() {
            a + half * comp
        } else {
            c
        };
        finite_or_zero(f(xx) * w)
    };
    let mut sum = eval(&mut f, T::zero());
    let mut k = 1;
    loop {
        let t = h * lit(k as f64);
        if t > tmax {
            break;
        }
        sum += eval(&mut f, t) + eval(&mut f, -t);
        k += 1;
    }
    let mut prev = sum * h * half;
    let mut err = f64::INFINITY;
    for _ in 0..MAX_LEVEL {
        h *= lit(0.5);
        let mut k = 1;
        loop {
            let t = h * lit(k as f64);
            if t > tmax {
                break;
            }
            sum += eval(&mut f, t) + eval(&mut f, -t);
            k += 2;
        }
        let cur = sum * h * half;
        err = to_f64((cur - prev).abs());
        prev = cur;
        if err <= tol.max(T::EPS_F64 * 10.0 * to_f64(cur.abs())) {
            return Ok(AccuracyReport::new(cur, err));
        }
    }
    Err(Error::NoConvergence { what: "tanh-sinh quadrature".into(), achieved: err, target: tol })
}

/// `∫_a^∞ f(x) dx` by exp-sinh with step halving.
pub fn exp_sinh<T: Scalar, F: FnMut(T) -> T>(mut f: F, a: T, tol: f64) -> Result<AccuracyReport<T>> {
    let pi2 = T::FRAC_PI_2();
    let tmax = lit::<T>(4.0);
    let tmin = lit::<T>(-5.0);
    let eval = |f: &mut F, t: T| -> T {
        let e = (pi2 * t.sinh()).exp();
        let w = pi2 * t.cosh() * e;
        finite_or_zero(f(a + e) * w)
    };
    let mut h = lit::<T>(0.5);
    let mut sum = T::zero();
    let mut k: i64 = (to_f64(tmin / h)).ceil() as i64;
    loop {
        let t = h * lit(k as f64);
        if t > tmax {
            break;
        }
        sum += eval(&mut f, t);
        k += 1;
    }
    let mut prev = sum * h;
    let mut err = f64::INFINITY;
    for _ in 0..MAX_LEVEL {
        h *= lit(0.5);
        let mut k: i64 = (to_f64(tmin / h)).ceil() as i64;
        if k % 2 == 0 {
            k += 1;
        }
        loop {
            let t = h * lit(k as f64);
            if t > tmax {
                break;
            }
            sum += eval(&mut f, t);
            k += 2;
        }
        let cur = sum * h;
        err = to_f64((cur - prev).abs());
        prev = cur;
        if err <= tol.max(T::EPS_F64 * 10.0 * to_f64(cur.abs())) {
            return Ok(AccuracyReport::new(cur, err));
        }
    }
    Err(Error::NoConvergence { what: "exp-sinh quadrature".into(), achieved: err, target: tol })
}

/// Cumulative trapezoid integral on a grid (first entry 0).
pub fn cumulative_trapezoid<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = T::zero();
    for i in 0..x.len() {
        if i > 0 {
            acc += (x[i] - x[i - 1]) * (y[i] + y[i - 1]) * lit(0.5);
        }
        out.push(acc);
    }
    out
}
