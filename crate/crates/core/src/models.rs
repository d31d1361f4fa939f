//! Parametric model descriptors and exact evaluation of their exponents.
//!
//! * [`LevyModel`] describes the spatial Lévy process `X` through its
//!   characteristic exponent `Ψ(z) = log E[exp(i z X_1)]`.
//! * [`SubordinatorModel`] describes a subordinator (the time change `Sub` or
//!   the boundary `K`) through its Laplace exponent `φ(u) = -log E[exp(-u S_1)]`.
//! * [`CompositeExponent`] evaluates `Ψ_q(z) = Ψ(z) - φ_Sub(φ_K(iz) + q) + φ_Sub(q)`,
//!   the exponent of the reduced process `X_t - K(Sub_t)` under Esscher tilting in `q`.
//!
//! The drift of a [`LevyModel`] is the plain linear coefficient of `Ψ`
//! (no compensation of small jumps): a compound Poisson model with drift `d`
//! has `Ψ(z) = i d z + Σ λ_k (E[e^{i z J_k}] - 1)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, re, Scalar};

/// Direction of a one-sided jump distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn factor<T: Scalar>(self) -> T {
        match self {
            Sign::Positive => T::one(),
            Sign::Negative => -T::one(),
        }
    }
}

/// Jump-size law of one finite-activity component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpDist<T> {
    /// `±Exp(rate)` jumps (mean `1/rate`).
    Exponential { rate: T, sign: Sign },
    /// Jumps of a fixed (signed) size.
    Fixed { size: T },
}

/// One compound Poisson component: jumps of law `dist` at intensity `intensity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpComponent<T> {
    pub intensity: T,
    pub dist: JumpDist<T>,
}

/// Jump part of a [`LevyModel`].
#[derive(Debug, Clone, PartialEq)]
pub enum JumpSpec<T> {
    None,
    /// Compound Poisson with intensity `rate` and `±Exp(jump_rate)` jumps.
    CompoundPoissonExp { rate: T, jump_rate: T, sign: Sign },
    /// Strictly stable, `Ψ(z) = -|z|^a exp(iπa(1/2 - ρ) sgn z)`.
    TwoSidedStable { index: T, rho: T },
    /// Spectrally negative strictly stable, `Ψ(-iu) = u^a`, `a ∈ (1, 2)`.
    SpectrallyNegativeStable { index: T },
    CustomFiniteActivity(Vec<JumpComponent<T>>),
}

/// Mean of `X_1`, allowing the infinite and undefined cases of heavy tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mean<T> {
    Finite(T),
    PlusInfinity,
    MinusInfinity,
    /// No mean and the process oscillates (e.g. symmetric Cauchy).
    Oscillating,
}

/// Lévy process `X` with Gaussian variance `sigma2`, linear drift and a jump spec.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyModel<T> {
    sigma2: T,
    drift: T,
    jumps: JumpSpec<T>,
    mirrored: bool,
}

fn check_positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Model(format!("{name} must be positive and finite, got {v}")))
    }
}

impl<T: Scalar> LevyModel<T> {
    /// Generic constructor; validates every parameter.
    pub fn new(sigma2: T, drift: T, jumps: JumpSpec<T>) -> Result<Self> {
        if !(sigma2 >= T::zero()) || !sigma2.is_finite() {
            return Err(Error::Model(format!("sigma2 must be >= 0, got {sigma2}")));
        }
        if !drift.is_finite() {
            return Err(Error::Model("drift must be finite".into()));
        }
        let mut sigma2 = sigma2;
        let jumps = match jumps {
            JumpSpec::CompoundPoissonExp { rate, jump_rate, sign } => {
                check_positive("compound Poisson rate", rate)?;
                check_positive("jump rate", jump_rate)?;
                JumpSpec::CompoundPoissonExp { rate, jump_rate, sign }
            }
            JumpSpec::TwoSidedStable { index, rho } => {
                let two = lit::<T>(2.0);
                if !(index > T::zero() && index < two) {
                    return Err(Error::Model(format!("stable index must lie in (0,2), got {index}")));
                }
                if !(rho >= T::zero() && rho <= T::one()) {
                    return Err(Error::Model(format!("positivity parameter must lie in [0,1], got {rho}")));
                }
                if index > T::one() && index * rho < index - T::one() - lit(1e-12) {
                    return Err(Error::Model(format!(
                        "for index {index} in (1,2) need index*rho >= index-1, got rho={rho}"
                    )));
                }
                if index > T::one() && (rho < T::one() - T::one() / index - lit(1e-12) || rho > T::one() / index + lit(1e-12)) {
                    return Err(Error::Model(format!(
                        "for index {index} in (1,2) rho must lie in [1-1/index, 1/index], got {rho}"
                    )));
                }
                if index == T::one() && (rho == T::zero() || rho == T::one()) {
                    return Err(Error::Model("index 1 requires rho in (0,1)".into()));
                }
                JumpSpec::TwoSidedStable { index, rho }
            }
            JumpSpec::SpectrallyNegativeStable { index } => {
                let two = lit::<T>(2.0);
                if !(index > T::one() && index <= two) {
                    return Err(Error::Model(format!(
                        "spectrally negative stable index must lie in (1,2], got {index}"
                    )));
                }
                if index == two {
                    // Ψ(-iu) = u² is Brownian motion with variance 2.
                    sigma2 += two;
                    JumpSpec::None
                } else {
                    JumpSpec::SpectrallyNegativeStable { index }
                }
            }
            JumpSpec::CustomFiniteActivity(comps) => {
                for c in &comps {
                    check_positive("component intensity", c.intensity)?;
                    match c.dist {
                        JumpDist::Exponential { rate, .. } => check_positive("exponential jump rate", rate)?,
                        JumpDist::Fixed { size } => {
                            if size == T::zero() || !size.is_finite() {
                                return Err(Error::Model("fixed jump size must be nonzero".into()));
                            }
                        }
                    }
                }
                if comps.is_empty() {
                    JumpSpec::None
                } else {
                    JumpSpec::CustomFiniteActivity(comps)
                }
            }
            JumpSpec::None => JumpSpec::None,
        };
        Ok(Self { sigma2, drift, jumps, mirrored: false })
    }

    /// Brownian motion with variance `sigma2` and drift.
    pub fn brownian(sigma2: T, drift: T) -> Result<Self> {
        Self::new(sigma2, drift, JumpSpec::None)
    }

    pub fn compound_poisson_exp(rate: T, jump_rate: T, sign: Sign, drift: T) -> Result<Self> {
        Self::new(T::zero(), drift, JumpSpec::CompoundPoissonExp { rate, jump_rate, sign })
    }

    pub fn spectrally_negative_stable(index: T) -> Result<Self> {
        Self::new(T::zero(), T::zero(), JumpSpec::SpectrallyNegativeStable { index })
    }

    pub fn two_sided_stable(index: T, rho: T) -> Result<Self> {
        Self::new(T::zero(), T::zero(), JumpSpec::TwoSidedStable { index, rho })
    }

    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    pub fn drift(&self) -> T {
        self.drift
    }

    pub fn jumps(&self) -> &JumpSpec<T> {
        &self.jumps
    }

    /// Orientation flag flipped by [`LevyModel::negated`]. The samplers use it
    /// so that `X` and `-X` driven by the same random numbers give paths that
    /// are exact negatives of each other.
    pub fn is_mirrored(&self) -> bool {
        self.mirrored
    }

    /// The dual process `-X`.
    pub fn negated(&self) -> Self {
        let jumps = match &self.jumps {
            JumpSpec::None => JumpSpec::None,
            JumpSpec::CompoundPoissonExp { rate, jump_rate, sign } => JumpSpec::CompoundPoissonExp {
                rate: *rate,
                jump_rate: *jump_rate,
                sign: sign.flip(),
            },
            JumpSpec::TwoSidedStable { index, rho } => JumpSpec::TwoSidedStable { index: *index, rho: T::one() - *rho },
            JumpSpec::SpectrallyNegativeStable { index } => JumpSpec::TwoSidedStable {
                index: *index,
                rho: T::one() - T::one() / *index,
            },
            JumpSpec::CustomFiniteActivity(c) => JumpSpec::CustomFiniteActivity(
                c.iter()
                    .map(|c| JumpComponent {
                        intensity: c.intensity,
                        dist: match c.dist {
                            JumpDist::Exponential { rate, sign } => JumpDist::Exponential { rate, sign: sign.flip() },
                            JumpDist::Fixed { size } => JumpDist::Fixed { size: -size },
                        },
                    })
                    .collect(),
            ),
        };
        Self { sigma2: self.sigma2, drift: -self.drift, jumps, mirrored: !self.mirrored }
    }

    /// No positive jumps.
    pub fn is_spectrally_negative(&self) -> bool {
        match &self.jumps {
            JumpSpec::None | JumpSpec::SpectrallyNegativeStable { .. } => true,
            JumpSpec::CompoundPoissonExp { sign, .. } => *sign == Sign::Negative,
            JumpSpec::TwoSidedStable { .. } => false,
            JumpSpec::CustomFiniteActivity(c) => c.iter().all(|c| match c.dist {
                JumpDist::Exponential { sign, .. } => sign == Sign::Negative,
                JumpDist::Fixed { size } => size < T::zero(),
            }),
        }
    }

    /// Finite-activity jumps only (compound Poisson plus Gaussian/drift part).
    pub fn is_finite_activity(&self) -> bool {
        matches!(
            self.jumps,
            JumpSpec::None | JumpSpec::CompoundPoissonExp { .. } | JumpSpec::CustomFiniteActivity(_)
        )
    }

    /// Finite-activity jump components as a list (empty for jump-free models).
    pub fn finite_components(&self) -> Vec<JumpComponent<T>> {
        match &self.jumps {
            JumpSpec::CompoundPoissonExp { rate, jump_rate, sign } => vec![JumpComponent {
                intensity: *rate,
                dist: JumpDist::Exponential { rate: *jump_rate, sign: *sign },
            }],
            JumpSpec::CustomFiniteActivity(c) => c.clone(),
            _ => Vec::new(),
        }
    }

    /// When the positive jumps are a single exponential family, returns
    /// `(total intensity, exponential rate)`.
    pub fn positive_exponential_jumps(&self) -> Option<(T, T)> {
        if !self.is_finite_activity() {
            return None;
        }
        let mut found: Option<(T, T)> = None;
        for c in self.finite_components() {
            match c.dist {
                JumpDist::Exponential { rate, sign: Sign::Positive } => match found {
                    None => found = Some((c.intensity, rate)),
                    Some((i, r)) if r == rate => found = Some((i + c.intensity, r)),
                    Some(_) => return None,
                },
                JumpDist::Fixed { size } if size > T::zero() => return None,
                _ => {}
            }
        }
        found
    }

    /// Largest admissible `Im z` below zero for the analytic extension (as `-bound`),
    /// and the upper bound above zero. Returns `(lower, upper)` for `Im z`.
    pub fn imaginary_strip(&self) -> (T, T) {
        let inf = T::infinity();
        match &self.jumps {
            JumpSpec::None => (-inf, inf),
            JumpSpec::SpectrallyNegativeStable { .. } => (-inf, T::zero()),
            JumpSpec::TwoSidedStable { .. } => (T::zero(), T::zero()),
            JumpSpec::CompoundPoissonExp { .. } | JumpSpec::CustomFiniteActivity(_) => {
                let (mut lo, mut hi) = (-inf, inf);
                for c in self.finite_components() {
                    if let JumpDist::Exponential { rate, sign } = c.dist {
                        match sign {
                            Sign::Positive => lo = lo.max(-rate),
                            Sign::Negative => hi = hi.min(rate),
                        }
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Characteristic exponent `Ψ(z)` (analytically extended off the real line where possible).
    pub fn psi(&self, z: Complex<T>) -> Result<Complex<T>> {
        let (lo, hi) = self.imaginary_strip();
        let tol = lit::<T>(1e-14) * (T::one() + z.norm());
        let poles = self.is_finite_activity();
        let open_lo = lo.is_finite() && poles;
        let open_hi = hi.is_finite() && poles;
        if (open_lo && z.im <= lo) || (!open_lo && z.im < lo - tol) || (open_hi && z.im >= hi) || (!open_hi && z.im > hi + tol) {
            return Err(Error::Domain(format!(
                "Ψ evaluated at Im z = {} outside the analytic strip ({lo}, {hi})",
                z.im
            )));
        }
        Ok(self.psi_continued(z))
    }

    /// `Ψ(z)` without the strip check: rational terms are continued
    /// meromorphically and `(iz)^a` uses the principal branch.
    pub fn psi_continued(&self, z: Complex<T>) -> Complex<T> {
        let i = Complex::<T>::i();
        let half = lit::<T>(0.5);
        let mut out = -z * z * (self.sigma2 * half) + i * z * self.drift;
        match &self.jumps {
            JumpSpec::None => {}
            JumpSpec::SpectrallyNegativeStable { index } => {
                let w = i * z;
                if w.norm() > T::zero() {
                    out += w.powf(*index);
                }
            }
            JumpSpec::TwoSidedStable { index, rho } => {
                let x = z.re;
                if x != T::zero() {
                    let phase = T::PI() * *index * (half - *rho) * x.signum();
                    out += -Complex::from_polar(x.abs().powf(*index), phase);
                }
            }
            JumpSpec::CompoundPoissonExp { .. } | JumpSpec::CustomFiniteActivity(_) => {
                for c in self.finite_components() {
                    let term = match c.dist {
                        JumpDist::Exponential { rate, sign: Sign::Positive } => i * z / (re(rate) - i * z),
                        JumpDist::Exponential { rate, sign: Sign::Negative } => -(i * z) / (re(rate) + i * z),
                        JumpDist::Fixed { size } => (i * z * size).exp() - T::one(),
                    };
                    out += term * c.intensity;
                }
            }
        }
        out
    }

    /// `Ψ(-iu)` for real `u`, i.e. `log E[exp(u X_1)]`.
    pub fn psi_neg_imag(&self, u: T) -> Result<T> {
        Ok(self.psi(Complex::new(T::zero(), -u))?.re)
    }

    /// `E[X_1]` with infinite/undefined cases.
    pub fn mean(&self) -> Mean<T> {
        let d = self.drift;
        match &self.jumps {
            JumpSpec::None | JumpSpec::SpectrallyNegativeStable { .. } => Mean::Finite(d),
            JumpSpec::TwoSidedStable { index, rho } => {
                if *index > T::one() {
                    Mean::Finite(d)
                } else if *rho == T::zero() {
                    Mean::MinusInfinity
                } else if *rho == T::one() {
                    Mean::PlusInfinity
                } else {
                    Mean::Oscillating
                }
            }
            JumpSpec::CompoundPoissonExp { .. } | JumpSpec::CustomFiniteActivity(_) => {
                let mut m = d;
                for c in self.finite_components() {
                    m += c.intensity
                        * match c.dist {
                            JumpDist::Exponential { rate, sign } => sign.factor::<T>() / rate,
                            JumpDist::Fixed { size } => size,
                        };
                }
                Mean::Finite(m)
            }
        }
    }

    /// `d_X + ∫_{-1}^0 |y| Π(dy)` for spectrally negative models, `+∞` when the integral diverges.
    pub fn sn_bounded_variation_drift(&self) -> Result<T> {
        if !self.is_spectrally_negative() {
            return Err(Error::Model("process has positive jumps".into()));
        }
        if self.sigma2 > T::zero() {
            return Ok(T::infinity());
        }
        match &self.jumps {
            JumpSpec::SpectrallyNegativeStable { .. } => Ok(T::infinity()),
            // With the uncompensated convention the linear coefficient already
            // is the bounded-variation drift.
            _ => Ok(self.drift),
        }
    }
}

/// Jump part of a [`SubordinatorModel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubJumps<T> {
    /// Pure drift (also the degenerate zero subordinator when the drift is 0).
    None,
    /// `φ(u) = u^α`.
    Stable { alpha: T },
    /// `φ(u) = (u + θ)^α - θ^α`.
    TemperedStable { alpha: T, theta: T },
    /// Compound Poisson with intensity `rate` and `Exp` jumps of mean `mean`.
    CompoundPoissonExp { rate: T, mean: T },
}

/// Subordinator with linear drift and one of the [`SubJumps`] specs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinatorModel<T> {
    drift: T,
    jumps: SubJumps<T>,
}

impl<T: Scalar> SubordinatorModel<T> {
    pub fn new(drift: T, jumps: SubJumps<T>) -> Result<Self> {
        if !(drift >= T::zero()) || !drift.is_finite() {
            return Err(Error::Model(format!("subordinator drift must be >= 0, got {drift}")));
        }
        match jumps {
            SubJumps::Stable { alpha } => check_unit_index(alpha)?,
            SubJumps::TemperedStable { alpha, theta } => {
                check_unit_index(alpha)?;
                check_positive("tempering parameter", theta)?;
            }
            SubJumps::CompoundPoissonExp { rate, mean } => {
                check_positive("jump intensity", rate)?;
                check_positive("jump mean", mean)?;
            }
            SubJumps::None => {}
        }
        Ok(Self { drift, jumps })
    }

    /// The degenerate subordinator `t ↦ drift·t`.
    pub fn pure_drift(drift: T) -> Result<Self> {
        Self::new(drift, SubJumps::None)
    }

    pub fn zero() -> Self {
        Self { drift: T::zero(), jumps: SubJumps::None }
    }

    pub fn stable(alpha: T) -> Result<Self> {
        Self::new(T::zero(), SubJumps::Stable { alpha })
    }

    pub fn drift(&self) -> T {
        self.drift
    }

    pub fn jumps(&self) -> SubJumps<T> {
        self.jumps
    }

    pub fn is_identically_zero(&self) -> bool {
        self.drift == T::zero() && self.jumps == SubJumps::None
    }

    pub fn is_pure_drift(&self) -> bool {
        self.jumps == SubJumps::None
    }

    /// Infinite activity of jumps (`μ(0,∞) = ∞`).
    pub fn has_infinite_activity(&self) -> bool {
        matches!(self.jumps, SubJumps::Stable { .. } | SubJumps::TemperedStable { .. })
    }

    /// The standing assumption on the time change: strictly increasing paths.
    pub fn validate_time_change(&self) -> Result<()> {
        if self.drift > T::zero() || self.has_infinite_activity() {
            Ok(())
        } else {
            Err(Error::Model(
                "time change must have positive drift or infinite jump activity (strictly increasing paths)".into(),
            ))
        }
    }

    /// Laplace exponent `φ(u)`, `Re u ≥ 0`.
    pub fn phi(&self, u: Complex<T>) -> Result<Complex<T>> {
        if u.re < T::zero() && !self.is_pure_drift() {
            return Err(Error::Domain(format!("Laplace exponent needs Re(u) >= 0, got {}", u.re)));
        }
        let lin = u * self.drift;
        let jump = match self.jumps {
            SubJumps::None => Complex::new(T::zero(), T::zero()),
            SubJumps::Stable { alpha } => {
                if u.norm() == T::zero() {
                    Complex::new(T::zero(), T::zero())
                } else {
                    u.powf(alpha)
                }
            }
            SubJumps::TemperedStable { alpha, theta } => (u + theta).powf(alpha) - theta.powf(alpha),
            SubJumps::CompoundPoissonExp { rate, mean } => u * (rate * mean) / (u * mean + T::one()),
        };
        Ok(lin + jump)
    }

    /// `φ(u)` for real `u ≥ 0`.
    pub fn phi_real(&self, u: T) -> Result<T> {
        if u < T::zero() && !self.is_pure_drift() {
            return Err(Error::Domain(format!("Laplace exponent needs u >= 0, got {u}")));
        }
        let jump = match self.jumps {
            SubJumps::None => T::zero(),
            SubJumps::Stable { alpha } => u.powf(alpha),
            SubJumps::TemperedStable { alpha, theta } => (u + theta).powf(alpha) - theta.powf(alpha),
            SubJumps::CompoundPoissonExp { rate, mean } => rate * mean * u / (T::one() + mean * u),
        };
        Ok(self.drift * u + jump)
    }

    /// `φ'(0) = E[S_1]`, possibly `+∞`.
    pub fn mean(&self) -> T {
        self.drift
            + match self.jumps {
                SubJumps::None => T::zero(),
                SubJumps::Stable { .. } => T::infinity(),
                SubJumps::TemperedStable { alpha, theta } => alpha * theta.powf(alpha - T::one()),
                SubJumps::CompoundPoissonExp { rate, mean } => rate * mean,
            }
    }
}

fn check_unit_index<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(Error::Model(format!("stable subordinator index must lie in (0,1), got {alpha}")))
    }
}

/// One first-passage problem: `T = inf{t : X_{ℓ_t} > a + K_t}` under `P_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemTriple<T> {
    pub x_process: LevyModel<T>,
    pub time_change: SubordinatorModel<T>,
    pub boundary: SubordinatorModel<T>,
    pub level: T,
    pub start: T,
}

impl<T: Scalar> ProblemTriple<T> {
    pub fn new(
        x_process: LevyModel<T>,
        time_change: SubordinatorModel<T>,
        boundary: SubordinatorModel<T>,
        level: T,
        start: T,
    ) -> Result<Self> {
        time_change.validate_time_change()?;
        if !level.is_finite() || !start.is_finite() {
            return Err(Error::Model("level and start must be finite".into()));
        }
        Ok(Self { x_process, time_change, boundary, level, start })
    }

    /// Level seen by the process started at 0 (spatial homogeneity).
    pub fn effective_level(&self) -> T {
        self.level - self.start
    }

    pub fn with_level(&self, level: T) -> Self {
        Self { level, ..self.clone() }
    }

    /// The dual problem `inf{t : X_t < -a - K_t}` expressed as a primal problem on `-X`.
    pub fn dual(&self) -> Self {
        Self { x_process: self.x_process.negated(), start: -self.start, ..self.clone() }
    }

    pub fn composite(&self, q: T) -> Result<CompositeExponent<T>> {
        CompositeExponent::new(self.clone(), q)
    }
}

/// Long-run behaviour of the reduced process `X_t - K(Sub_t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftVerdict {
    /// Drifts to `-∞`: passage happens with probability < 1.
    Yes,
    /// Drifts to `+∞` or oscillates: passage is almost sure.
    No,
    /// Mean of the form `∞ - ∞`; the zoo cannot decide in closed form.
    Undetermined,
}

/// `Ψ_q(z) = Ψ(z) - φ_Sub(φ_K(iz) + q) + φ_Sub(q)` for a fixed problem and `q ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeExponent<T> {
    pub base: ProblemTriple<T>,
    pub q: T,
}

impl<T: Scalar> CompositeExponent<T> {
    pub fn new(base: ProblemTriple<T>, q: T) -> Result<Self> {
        if !(q >= T::zero()) || !q.is_finite() {
            return Err(Error::Domain(format!("q must be >= 0, got {q}")));
        }
        Ok(Self { base, q })
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        let psi = self.base.x_process.psi(z)?;
        let sub = &self.base.time_change;
        let k = &self.base.boundary;
        let q = re(self.q);
        let inner = if k.is_identically_zero() {
            q
        } else {
            let arg = Complex::<T>::i() * z;
            let v = k.phi(arg)? + q;
            if v.re < -lit::<T>(1e-14) {
                return Err(Error::Domain(format!("Re(φ_K(iz)+q) = {} < 0", v.re)));
            }
            Complex::new(v.re.max(T::zero()), v.im)
        };
        Ok(psi - sub.phi(inner)? + sub.phi(q)?)
    }

    /// `Ψ_q(-iu)` for real `u ≥ 0`; real-valued.
    pub fn eval_neg_imag(&self, u: T) -> Result<T> {
        let psi = self.base.x_process.psi_neg_imag(u)?;
        let sub = &self.base.time_change;
        let k = &self.base.boundary;
        let inner = if k.is_identically_zero() { self.q } else { k.phi_real(u)? + self.q };
        Ok(psi - sub.phi_real(inner)? + sub.phi_real(self.q)?)
    }

    /// `E[X_1] - φ'_Sub(0) φ'_K(0)` with the convention `∞ · 0 = 0`, as an extended real.
    pub fn reduced_mean(&self) -> Mean<T> {
        let kmean = self.base.boundary.mean();
        let smean = self.base.time_change.mean();
        let pull = if kmean == T::zero() || smean == T::zero() { T::zero() } else { smean * kmean };
        match self.base.x_process.mean() {
            Mean::Finite(m) => {
                if pull.is_infinite() {
                    Mean::MinusInfinity
                } else {
                    Mean::Finite(m - pull)
                }
            }
            Mean::MinusInfinity => Mean::MinusInfinity,
            Mean::PlusInfinity => {
                if pull.is_infinite() {
                    Mean::Oscillating
                } else {
                    Mean::PlusInfinity
                }
            }
            Mean::Oscillating => {
                if pull.is_infinite() {
                    Mean::Oscillating
                } else {
                    Mean::Finite(T::nan())
                }
            }
        }
    }

    /// Whether the reduced process drifts to `-∞` (evaluated at `q = 0`).
    pub fn drifts_to_minus_infinity(&self) -> DriftVerdict {
        let x_mean = self.base.x_process.mean();
        match (x_mean, self.reduced_mean()) {
            (_, Mean::MinusInfinity) => DriftVerdict::Yes,
            (_, Mean::PlusInfinity) => DriftVerdict::No,
            // ∞ - ∞ between a heavy-tailed X and an infinite-mean K∘Sub.
            (_, Mean::Oscillating) => DriftVerdict::Undetermined,
            // Stable X without mean plus a finite linear pull: the stable part dominates.
            (Mean::Oscillating, Mean::Finite(_)) => DriftVerdict::No,
            (_, Mean::Finite(m)) => {
                if m < T::zero() {
                    DriftVerdict::Yes
                } else {
                    // m = 0: a non-degenerate Lévy process with zero mean oscillates.
                    DriftVerdict::No
                }
            }
        }
    }
}

/// Convenience: `drifts_to_minus_infinity` at `q = 0` for a problem.
pub fn drifts_to_minus_infinity<T: Scalar>(problem: &ProblemTriple<T>) -> DriftVerdict {
    CompositeExponent { base: problem.clone(), q: T::zero() }.drifts_to_minus_infinity()
}


#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn psi_examples() {
        let bm = LevyModel::spectrally_negative_stable(2.0).unwrap();
        assert_eq!(bm.sigma2(), 2.0);
        assert!(close(bm.psi(c(0.0, -2.0)).unwrap(), c(4.0, 0.0), 1e-14));

        let cp = LevyModel::compound_poisson_exp(1.0, 1.0, Sign::Positive, 0.0).unwrap();
        assert_eq!(cp.psi(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        // iλz/(p - iz) at z = i: -1/2
        assert!(close(cp.psi(c(0.0, 1.0)).unwrap(), c(-0.5, 0.0), 1e-15));
    }

    #[test]
    fn psi_domain_errors() {
        let cp = LevyModel::compound_poisson_exp(1.0, 1.0, Sign::Positive, 0.0).unwrap();
        assert!(cp.psi(c(0.0, -1.0)).is_err());
        assert!(cp.psi(c(0.0, -0.5)).is_ok());
        let st = LevyModel::two_sided_stable(1.5, 0.5).unwrap();
        assert!(st.psi(c(1.0, 0.3)).is_err());
        let sn = LevyModel::spectrally_negative_stable(1.6).unwrap();
        assert!(sn.psi(c(0.0, 0.5)).is_err());
        assert!((sn.psi_neg_imag(3.0).unwrap() - 3f64.powf(1.6)).abs() < 1e-12);
    }

    #[test]
    fn stable_parameter_validation() {
        assert!(LevyModel::two_sided_stable(1.5, 0.2).is_err());
        assert!(LevyModel::two_sided_stable(1.5, 0.5).is_ok());
        assert!(LevyModel::spectrally_negative_stable(0.8).is_err());
        assert!(SubordinatorModel::stable(1.0).is_err());
        assert!(SubordinatorModel::<f64>::pure_drift(-1.0).is_err());
    }

    #[test]
    fn phi_examples() {
        let s = SubordinatorModel::stable(0.5).unwrap();
        assert!(close(s.phi(c(4.0, 0.0)).unwrap(), c(2.0, 0.0), 1e-15));
        let d = SubordinatorModel::pure_drift(1.7).unwrap();
        assert!(close(d.phi(c(2.0, 1.0)).unwrap(), c(3.4, 1.7), 1e-15));
        let t = SubordinatorModel::new(0.0, SubJumps::TemperedStable { alpha: 0.5f64, theta: 1.0 }).unwrap();
        assert!((t.phi_real(3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(s.phi(c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn composite_examples() {
        let bm = LevyModel::brownian(1.0, 0.0).unwrap();
        let p = ProblemTriple::new(bm.clone(), SubordinatorModel::stable(0.5).unwrap(), SubordinatorModel::zero(), 1.0, 0.0)
            .unwrap();
        let ce = p.composite(0.0).unwrap();
        let z = c(0.7, -0.2);
        assert!(close(ce.eval(z).unwrap(), bm.psi(z).unwrap(), 1e-15));

        let sn = LevyModel::spectrally_negative_stable(1.6).unwrap();
        let p = ProblemTriple::new(sn, SubordinatorModel::stable(0.8).unwrap(), SubordinatorModel::zero(), 1.0, 0.0).unwrap();
        let ce = p.composite(0.0).unwrap();
        assert!((ce.eval_neg_imag(2.0).unwrap() - 2f64.powf(1.6)).abs() < 1e-12);

        let cp = LevyModel::compound_poisson_exp(1.0, 1.0, Sign::Positive, 0.0).unwrap();
        let p = ProblemTriple::new(
            cp,
            SubordinatorModel::stable(0.5).unwrap(),
            SubordinatorModel::pure_drift(1.0).unwrap(),
            1.0,
            0.0,
        )
        .unwrap();
        let ce = p.composite(0.0).unwrap();
        let v = ce.eval(c(0.0, -0.25)).unwrap();
        assert!(close(v, c(-1.0 / 6.0, 0.0), 1e-14), "{v}");
        assert!((ce.eval_neg_imag(0.25).unwrap() + 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn drift_verdicts() {
        let sub = SubordinatorModel::stable(0.5).unwrap();
        let cp = LevyModel::compound_poisson_exp(1.0, 1.0, Sign::Positive, 0.0).unwrap();
        let p = ProblemTriple::new(cp, sub, SubordinatorModel::pure_drift(1.0).unwrap(), 1.0, 0.0).unwrap();
        assert_eq!(drifts_to_minus_infinity(&p), DriftVerdict::Yes);

        let bm = LevyModel::brownian(1.0, 0.0).unwrap();
        let p = ProblemTriple::new(bm, sub, SubordinatorModel::zero(), 1.0, 0.0).unwrap();
        assert_eq!(drifts_to_minus_infinity(&p), DriftVerdict::No);

        let bm = LevyModel::brownian(1.0, -1.0).unwrap();
        let p = ProblemTriple::new(bm, sub, SubordinatorModel::zero(), 1.0, 0.0).unwrap();
        assert_eq!(drifts_to_minus_infinity(&p), DriftVerdict::Yes);

        // Exponential inter-arrivals, λ/p = 1 = φ'_Sub(0)φ'_K(0): zero mean, oscillates.
        let cp = LevyModel::compound_poisson_exp(1.0, 1.0, Sign::Positive, 0.0).unwrap();
        let p = ProblemTriple::new(cp, SubordinatorModel::pure_drift(1.0).unwrap(), SubordinatorModel::pure_drift(1.0).unwrap(), 1.0, 0.0)
            .unwrap();
        assert_eq!(drifts_to_minus_infinity(&p), DriftVerdict::No);
    }

    #[test]
    fn time_change_assumption() {
        let cp = SubordinatorModel::new(0.0, SubJumps::CompoundPoissonExp { rate: 1.0, mean: 1.0 }).unwrap();
        assert!(cp.validate_time_change().is_err());
        let cpd = SubordinatorModel::new(0.5, SubJumps::CompoundPoissonExp { rate: 1.0, mean: 1.0 }).unwrap();
        assert!(cpd.validate_time_change().is_ok());
        let bm = LevyModel::brownian(1.0, 0.0).unwrap();
        assert!(ProblemTriple::new(bm, cp, SubordinatorModel::zero(), 1.0, 0.0).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let s = SubordinatorModel::<f32>::stable(0.5).unwrap();
        assert!((s.phi_real(4.0).unwrap() - 2.0).abs() < 1e-6);
        let bm = LevyModel::<f32>::brownian(1.0, 0.0).unwrap();
        assert!((bm.psi_neg_imag(2.0).unwrap() - 2.0).abs() < 1e-6);
    }
}
