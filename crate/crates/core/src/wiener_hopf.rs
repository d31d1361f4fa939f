//! Positive Wiener-Hopf factors of the composite exponent `Ψ_q` and both
//! sides of the composite factorization identity.
//!
//! Two families have closed factors:
//!
//! * spectrally negative `X`: `Φ(ϱ; z) = φ(ϱ)/(φ(ϱ) - iz)` with `φ` the right
//!   inverse of `u ↦ Ψ_q(-iu)`;
//! * `X` with positive `Exp(p)` jumps of finite activity:
//!   `Φ(ϱ; iu) = ((u+p)/p) · R/(u+R)`, times `R₂/(u+R₂)` when the reduced
//!   process creeps upwards, where `R < p < R₂` solve `Ψ_q(-iu) = ϱ`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::models::{CompositeExponent, DriftVerdict, LevyModel, ProblemTriple, Sign};
use crate::scalar::{lit, re, to_f64, Scalar};
use crate::special::roots::{bracketed_root, expand_until};

const MAX_DOUBLINGS: usize = 200;

/// Closed-form family of a positive Wiener-Hopf factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WhFamily<T> {
    /// `root = φ(ϱ)`.
    SpectrallyNegative { root: T },
    /// Positive jumps `Exp(jump_rate)`; `root ∈ (0, jump_rate)`, `second_root > jump_rate`.
    ExponentialJumps { jump_rate: T, root: T, second_root: Option<T> },
}

/// A solved positive factor `Φ(ϱ; ·)` of `Ψ_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhFactor<T> {
    pub family: WhFamily<T>,
    pub q: T,
    pub varrho: T,
    exponent: CompositeExponent<T>,
}

impl<T: Scalar> WhFactor<T> {
    /// Solve the factor of `ce` at `ϱ`.
    pub fn solve(ce: &CompositeExponent<T>, varrho: T) -> Result<Self> {
        if !(varrho >= T::zero()) || !varrho.is_finite() {
            return Err(Error::Domain(format!("ϱ must be >= 0, got {varrho}")));
        }
        let x = &ce.base.x_process;
        let family = if x.is_spectrally_negative() {
            WhFamily::SpectrallyNegative { root: solve_sn(ce, varrho)? }
        } else if let Some((_, rate)) = x.positive_exponential_jumps() {
            let root = solve_lm(ce, varrho, rate)?;
            let second_root = if creeps_upwards(ce) { Some(solve_lm_second(ce, varrho, rate)?) } else { None };
            WhFamily::ExponentialJumps { jump_rate: rate, root, second_root }
        } else {
            return Err(Error::Model(
                "closed Wiener-Hopf factors need a spectrally negative X or positive exponential jumps".into(),
            ));
        };
        Ok(Self { family, q: ce.q, varrho, exponent: ce.clone() })
    }

    /// The root `φ(ϱ)` (SN) or `R(ϱ)` (exponential jumps).
    pub fn root(&self) -> T {
        match self.family {
            WhFamily::SpectrallyNegative { root } | WhFamily::ExponentialJumps { root, .. } => root,
        }
    }

    pub fn exponent(&self) -> &CompositeExponent<T> {
        &self.exponent
    }

    /// `Φ(ϱ; z)` for `Im z ≥ 0`.
    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        if z.im < T::zero() {
            return Err(Error::Domain(format!("positive factor needs Im z >= 0, got {}", z.im)));
        }
        self.eval_continued(z)
    }

    /// `Φ(ϱ; z)` by its rational formula, without the half-plane check.
    fn eval_continued(&self, z: Complex<T>) -> Result<Complex<T>> {
        let one = Complex::new(T::one(), T::zero());
        if z.norm() == T::zero() {
            return Ok(one);
        }
        let u = -Complex::<T>::i() * z;
        match self.family {
            WhFamily::SpectrallyNegative { root } => {
                if root == T::zero() {
                    return Err(Error::NoRoot("φ(ϱ) = 0: the factor degenerates".into()));
                }
                Ok(re(root) / (u + root))
            }
            WhFamily::ExponentialJumps { jump_rate, root, second_root } => {
                let mut v = (u + jump_rate) / jump_rate * root / (u + root);
                if let Some(r2) = second_root {
                    v = v * r2 / (u + r2);
                }
                Ok(v)
            }
        }
    }

    /// Negative factor as the quotient `ϱ / ((ϱ - Ψ_q(z)) Φ(ϱ; z))`.
    pub fn negative_factor(&self, z: Complex<T>) -> Result<Complex<T>> {
        if self.varrho == T::zero() {
            return Err(Error::Domain("negative factor quotient needs ϱ > 0".into()));
        }
        let psi = continued_exponent(&self.exponent, z)?;
        Ok(re(self.varrho) / ((re(self.varrho) - psi) * self.eval_continued(z)?))
    }

    /// Worst violation on the real grid `zs` of the product identity
    /// `Φ Φ̂ = ϱ/(ϱ - Ψ_q)` and of the bounds `|Φ| ≤ 1`, `|Φ̂| ≤ 1`, together
    /// with `|Φ̂(0⁺) - 1|`.
    pub fn factorization_residual(&self, zs: &[T]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &x in zs {
            let z = Complex::new(x, T::zero());
            let phi = self.eval(z)?;
            let hat = self.negative_factor(z)?;
            let psi = continued_exponent(&self.exponent, z)?;
            let lhs = phi * hat * (re(self.varrho) - psi) / self.varrho;
            worst = worst.max(to_f64((lhs - T::one()).norm()));
            worst = worst.max(to_f64(phi.norm()) - 1.0).max(to_f64(hat.norm()) - 1.0);
        }
        let tiny = lit::<T>(1e-7);
        let at0 = self.negative_factor(Complex::new(tiny, T::zero()))?;
        worst = worst.max(to_f64((at0 - T::one()).norm()) - 1e-6);
        Ok(worst.max(0.0))
    }
}

/// `Ψ_q(z)` with finite-activity jump parts continued meromorphically beyond their strip.
pub fn continued_exponent<T: Scalar>(ce: &CompositeExponent<T>, z: Complex<T>) -> Result<Complex<T>> {
    let x = &ce.base.x_process;
    if !x.is_finite_activity() && !x.is_spectrally_negative() {
        return ce.eval(z);
    }
    let iz = Complex::<T>::i() * z;
    let psi = x.psi_continued(z);
    let sub = &ce.base.time_change;
    let k = &ce.base.boundary;
    let q = re(ce.q);
    let inner = if k.is_identically_zero() { q } else { k.phi(iz)? + q };
    Ok(psi - sub.phi(inner)? + sub.phi(q)?)
}

fn continued_real<T: Scalar>(ce: &CompositeExponent<T>, u: T) -> Result<T> {
    Ok(continued_exponent(ce, Complex::new(T::zero(), -u))?.re)
}

fn root_tol<T: Scalar>(varrho: T) -> T {
    lit::<T>(1e-12f64.max(T::EPS_F64 * 64.0)) * varrho.max(T::one())
}

/// `σ² > 0`, or bounded variation with positive drift `d_X - δ_K 𝚔_Sub`.
fn creeps_upwards<T: Scalar>(ce: &CompositeExponent<T>) -> bool {
    let x = &ce.base.x_process;
    x.sigma2() > T::zero() || x.drift() - ce.base.boundary.drift() * ce.base.time_change.drift() > T::zero()
}

/// A point `u ∈ (0, cap)` with `f(u) < 0`, searching `cap·2^{-k}`.
fn negative_point<T: Scalar>(mut f: impl FnMut(T) -> Result<T>, cap: T) -> Result<Option<T>> {
    let mut u = cap * lit(0.5);
    for _ in 0..MAX_DOUBLINGS {
        if u <= T::min_positive_value() {
            break;
        }
        if f(u)? < T::zero() {
            return Ok(Some(u));
        }
        u *= lit(0.5);
    }
    Ok(None)
}

fn solve_sn<T: Scalar>(ce: &CompositeExponent<T>, varrho: T) -> Result<T> {
    let f = |u: T| -> Result<T> { Ok(ce.eval_neg_imag(u)? - varrho) };
    let lo = if varrho > T::zero() {
        T::zero()
    } else {
        match ce.drifts_to_minus_infinity() {
            DriftVerdict::No => return Ok(T::zero()),
            _ => {
                let upper = expand_until(T::one(), |u| Ok(f(u)? > T::zero()), MAX_DOUBLINGS)?;
                match negative_point(f, upper)? {
                    Some(u) => u,
                    None => return Ok(T::zero()),
                }
            }
        }
    };
    let hi = expand_until(lo.max(T::one()), |u| Ok(f(u)? > T::zero()), MAX_DOUBLINGS)?;
    bracketed_root(f, lo, hi, root_tol(varrho))
}

fn solve_lm<T: Scalar>(ce: &CompositeExponent<T>, varrho: T, rate: T) -> Result<T> {
    let f = |u: T| -> Result<T> { Ok(continued_real(ce, u)? - varrho) };
    let lo = if varrho > T::zero() {
        T::zero()
    } else {
        if ce.drifts_to_minus_infinity() == DriftVerdict::No {
            return Err(Error::NoRoot(
                "R(0) degenerates to 0: the reduced process does not drift to -∞".into(),
            ));
        }
        negative_point(f, rate)?.ok_or_else(|| Error::NoRoot("no negative value of Ψ_q(-iu) on (0, p)".into()))?
    };
    let mut gap = rate * lit(0.5);
    let mut hi = rate - gap;
    for _ in 0..MAX_DOUBLINGS {
        if f(hi)? > T::zero() {
            break;
        }
        gap *= lit(0.5);
        hi = rate - gap;
        if gap <= rate * T::epsilon() {
            return Err(Error::Bracket("Ψ_q(-iu) stays below ϱ on (0, p)".into()));
        }
    }
    bracketed_root(f, lo, hi, root_tol(varrho))
}

fn solve_lm_second<T: Scalar>(ce: &CompositeExponent<T>, varrho: T, rate: T) -> Result<T> {
    let f = |u: T| -> Result<T> { Ok(continued_real(ce, u)? - varrho) };
    let mut gap = rate * lit(0.5);
    let mut lo = rate + gap;
    while f(lo)? >= T::zero() {
        gap *= lit(0.5);
        lo = rate + gap;
        if gap <= rate * T::epsilon() {
            return Err(Error::Bracket("no sign change just above p".into()));
        }
    }
    let hi = expand_until(lo, |u| Ok(f(u)? > T::zero()), MAX_DOUBLINGS)?;
    bracketed_root(f, lo, hi, root_tol(varrho))
}

/// Root `u*` of `Ψ_q(-iu) = ϱ` for the family of `ce`: `φ(ϱ)` or `R(ϱ)`.
pub fn solve_root<T: Scalar>(ce: &CompositeExponent<T>, varrho: T) -> Result<T> {
    Ok(WhFactor::solve(ce, varrho)?.root())
}

/// `Φ(f; z)` for `Im z ≥ 0`.
pub fn wh_factor<T: Scalar>(f: &WhFactor<T>, z: Complex<T>) -> Result<Complex<T>> {
    f.eval(z)
}

fn check_pv<T: Scalar>(p: T, v: T) -> Result<()> {
    if !(p > T::zero()) || !(v >= T::zero()) || p == v {
        return Err(Error::Domain(format!("need p > 0, v >= 0 and p != v, got p = {p}, v = {v}")));
    }
    Ok(())
}

fn rhs<T: Scalar>(f: &WhFactor<T>, p: T, v: T) -> Result<T> {
    let num = f.eval(Complex::new(T::zero(), p))?;
    let den = f.eval(Complex::new(T::zero(), v))?;
    Ok(p / (p - v) * (T::one() - (num / den).re))
}

/// `E[exp(-q T_{e_p} - v·overshoot)]` for an independent `Exp(p)` level:
/// `(p/(p-v)) (1 - Φ(φ_Sub(q); ip)/Φ(φ_Sub(q); iv))`.
pub fn composite_rhs<T: Scalar>(problem: &ProblemTriple<T>, q: T, p: T, v: T) -> Result<T> {
    if !(q > T::zero()) {
        return Err(Error::Domain(format!("q must be > 0, got {q}")));
    }
    check_pv(p, v)?;
    let ce = problem.composite(q)?;
    let varrho = problem.time_change.phi_real(q)?;
    rhs(&WhFactor::solve(&ce, varrho)?, p, v)
}

/// The `q = 0` identity `E[exp(-v·overshoot); T_{e_p} < ∞]`, valid when the
/// reduced process drifts to `-∞`.
pub fn composite_rhs_q0<T: Scalar>(problem: &ProblemTriple<T>, p: T, v: T) -> Result<T> {
    check_pv(p, v)?;
    let ce = problem.composite(T::zero())?;
    if ce.drifts_to_minus_infinity() != DriftVerdict::Yes {
        return Err(Error::NoRoot(
            "the reduced process does not drift to -∞: the passage time is finite almost surely".into(),
        ));
    }
    rhs(&WhFactor::solve(&ce, T::zero())?, p, v)
}

/// Convenience: the positive-jump model of the Cox-renewal example with
/// exponential claims (`X_t = Σ Exp(p)` claims at rate `λ`, no drift).
pub fn claims_model<T: Scalar>(lambda: T, p: T) -> Result<LevyModel<T>> {
    LevyModel::compound_poisson_exp(lambda, p, Sign::Positive, T::zero())
}
