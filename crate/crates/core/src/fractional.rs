//! First passage under a stable time change `Sub` of index `α ∈ (0,1)`.
//!
//! With `K ≡ 0` the passage time factorizes as `T₀ =(d) Sub₁ · T₀(X)^{1/α}`,
//! so `E[T₀^z] = Γ(1-z/α)/Γ(1-z) · E[T₀(X)^{z/α}]`. Densities follow by
//! Mellin inversion, `f^{(n)}(t) = (1/2πi) ∫ (-1)^n (z+1)_n t^{-z-1-n} E[T₀^z] dz`.
//!
//! For a strictly stable `X` the Mellin transform of the exit time from the
//! half-line is expressed through the double gamma function `G_{1/𝔞}`; in the
//! spectrally negative case it reduces to gamma functions and the density has
//! a convergent series in `t^{-α}`.

use std::io::Write;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::sampler::rng::RngStream;
use crate::sampler::variates::stable_subordinator_unit;
use crate::scalar::{lit, re, to_f64, Scalar};
use crate::special::{
    bessel_k, gamma, log_barnes_g, log_gamma, mellin_barnes_integrate, AccuracyReport, DecayEnvelope, MellinLine,
};

/// `E[T₀(X)^s; T₀(X) < ∞]` of the passage time of the untimed process.
pub trait BaseMellin<T: Scalar> {
    fn mellin(&self, s: Complex<T>) -> Result<Complex<T>>;

    /// Open strip `(lo, hi)` of `Re s` where the transform is finite.
    fn strip(&self) -> (T, T);

    /// `E[T₀(X)]` when finite and the passage is almost sure.
    fn mean(&self) -> Option<T>;

    /// Exponential decay rate of `|mellin(c + ib)|` in `|b|` (0 when unknown).
    fn decay_rate(&self) -> f64 {
        0.0
    }
}

/// Passage of `μt + σB_t` from `-x` to `0`: inverse Gaussian with mean
/// `x/|μ|` and shape `x²/σ²`, defective with mass `exp(-2|μ|x/σ²)` when `μ < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianPassage<T> {
    pub drift: T,
    pub sigma2: T,
    pub distance: T,
}

impl<T: Scalar> BrownianPassage<T> {
    pub fn new(drift: T, sigma2: T, distance: T) -> Result<Self> {
        if !(sigma2 > T::zero()) || !(distance > T::zero()) {
            return Err(Error::Model(format!("need σ² > 0 and x > 0, got {sigma2}, {distance}")));
        }
        if drift == T::zero() {
            return Err(Error::Model("driftless Brownian passage has no finite Mellin strip around 1".into()));
        }
        Ok(Self { drift, sigma2, distance })
    }

    /// Inverse Gaussian mean `x/|μ|`.
    pub fn ig_mean(&self) -> T {
        self.distance / self.drift.abs()
    }

    /// Inverse Gaussian shape `x²/σ²`.
    pub fn ig_shape(&self) -> T {
        self.distance * self.distance / self.sigma2
    }

    /// `P(T₀(X) < ∞)`.
    pub fn finite_mass(&self) -> T {
        if self.drift > T::zero() {
            T::one()
        } else {
            (lit::<T>(-2.0) * self.drift.abs() * self.distance / self.sigma2).exp()
        }
    }
}

impl BrownianPassage<f64> {
    /// One draw of `T₀(X)` (`∞` on the defective part).
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        if self.drift < 0.0 && rng.uniform() > self.finite_mass() {
            return f64::INFINITY;
        }
        rng.inverse_gaussian(self.ig_mean(), self.ig_shape())
    }
}

impl<T: Scalar> BaseMellin<T> for BrownianPassage<T> {
    /// `√(2λ/π) e^{λ/m} m^{s-1/2} K_{s-1/2}(λ/m)`.
    fn mellin(&self, s: Complex<T>) -> Result<Complex<T>> {
        let (m, lam) = (self.ig_mean(), self.ig_shape());
        let half = lit::<T>(0.5);
        let nu = s - half;
        let k = bessel_k(nu, lam / m)?;
        let pref = (lit::<T>(2.0) * lam / T::PI()).sqrt() * (lam / m).exp() * self.finite_mass();
        Ok((nu * m.ln()).exp() * k * pref)
    }

    fn strip(&self) -> (T, T) {
        (T::neg_infinity(), T::infinity())
    }

    fn mean(&self) -> Option<T> {
        (self.drift > T::zero()).then(|| self.ig_mean())
    }

    fn decay_rate(&self) -> f64 {
        std::f64::consts::FRAC_PI_2
    }
}

/// Sample moments `mean(τ^s)` of simulated passage times (censored draws count as infinite).
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMellin {
    finite: Vec<f64>,
    total: usize,
}

impl EmpiricalMellin {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let finite: Vec<f64> = samples.iter().copied().filter(|t| t.is_finite() && *t > 0.0).collect();
        Ok(Self { finite, total: samples.len() })
    }

    /// Estimate of `E[τ^s; τ < ∞]` with its standard error.
    pub fn mellin_with_error(&self, s: Complex<f64>) -> (Complex<f64>, f64) {
        let n = self.total as f64;
        let mut sum = Complex::new(0.0, 0.0);
        let mut sq = 0.0;
        for &t in &self.finite {
            let v = (s * t.ln()).exp();
            sum += v;
            sq += v.norm_sqr();
        }
        let mean = sum / n;
        let var = (sq / n - mean.norm_sqr()).max(0.0) * n / (n - 1.0).max(1.0);
        (mean, (var / n).sqrt())
    }
}

impl BaseMellin<f64> for EmpiricalMellin {
    fn mellin(&self, s: Complex<f64>) -> Result<Complex<f64>> {
        Ok(self.mellin_with_error(s).0)
    }

    fn strip(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn mean(&self) -> Option<f64> {
        (self.finite.len() == self.total).then(|| self.finite.iter().sum::<f64>() / self.total as f64)
    }
}

/// `E[Sub₁^z] = Γ(1-z/α)/Γ(1-z)` for `Re z < α`.
pub fn stable_subordinator_mellin<T: Scalar>(alpha: T, z: Complex<T>) -> Result<Complex<T>> {
    if !(z.re < alpha) {
        return Err(Error::Strip { value: to_f64(z.re), lower: f64::NEG_INFINITY, upper: to_f64(alpha) });
    }
    let one = re(T::one());
    Ok((log_gamma(one - z / alpha)? - log_gamma(one - z)?).exp())
}

/// `T₀ = Sub₁ · T₀(X)^{1/α}` given a draw of `T₀(X)`.
pub fn factorized_sample(alpha: f64, t0x: f64, rng: &mut RngStream) -> Result<f64> {
    check_alpha(alpha)?;
    let s = stable_subordinator_unit(alpha, rng);
    Ok(if t0x.is_finite() { s * t0x.powf(1.0 / alpha) } else { f64::INFINITY })
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time-change index must lie in (0,1), got {alpha}")))
    }
}

/// Passage time `T₀` of `X_ℓ` for a stable time change of index `alpha`.
#[derive(Debug, Clone)]
pub struct FractionalProblem<T, B> {
    pub alpha: T,
    pub base: B,
}

/// One row of a density table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPoint {
    pub t: f64,
    pub f: f64,
    pub err: f64,
}

/// CSV with header `t,f,errEstimate`.
pub fn write_density_csv<W: Write>(points: &[DensityPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "f", "errEstimate"])?;
    for p in points {
        w.write_record([p.t.to_string(), p.f.to_string(), p.err.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

impl<T: Scalar, B: BaseMellin<T>> FractionalProblem<T, B> {
    pub fn new(alpha: T, base: B) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha, base })
    }

    /// Open strip of `Re z` for `E[T₀^z]`.
    pub fn strip(&self) -> (T, T) {
        let (lo, hi) = self.base.strip();
        (lo * self.alpha, (hi * self.alpha).min(self.alpha))
    }

    /// `E[T₀^z; T₀ < ∞]`.
    pub fn mellin(&self, z: Complex<T>) -> Result<Complex<T>> {
        let (lo, hi) = self.strip();
        if !(z.re > lo && z.re < hi) {
            return Err(Error::Strip { value: to_f64(z.re), lower: to_f64(lo), upper: to_f64(hi) });
        }
        Ok(stable_subordinator_mellin(self.alpha, z)? * self.base.mellin(z / self.alpha)?)
    }

    /// `P(T₀ < ∞)`.
    pub fn mass(&self) -> Result<T> {
        Ok(self.mellin(Complex::new(T::zero(), T::zero()))?.re)
    }

    fn envelope(&self) -> Option<DecayEnvelope> {
        let a = to_f64(self.alpha);
        let rate = self.base.decay_rate() / a + std::f64::consts::FRAC_PI_2 * (1.0 / a - 1.0);
        (rate > 0.0).then_some(DecayEnvelope { rate })
    }

    fn check_line(&self, line: &MellinLine<T>) -> Result<()> {
        let (lo, hi) = self.strip();
        if !(line.abscissa > lo && line.abscissa < hi) {
            return Err(Error::Strip { value: to_f64(line.abscissa), lower: to_f64(lo), upper: to_f64(hi) });
        }
        Ok(())
    }

    /// `f^{(n)}_{T₀}(t)`, `n ≤ 4`, by Mellin inversion on `line` (`abscissa > -1`).
    pub fn density(&self, t: T, n: u32, line: &MellinLine<T>) -> Result<AccuracyReport<T>> {
        if !(t > T::zero()) {
            return Err(Error::Domain(format!("density needs t > 0, got {t}")));
        }
        if n > 4 {
            return Err(Error::Domain(format!("derivative order {n} > 4")));
        }
        self.check_line(line)?;
        if !(line.abscissa > -T::one()) {
            return Err(Error::Strip { value: to_f64(line.abscissa), lower: -1.0, upper: to_f64(self.strip().1) });
        }
        let one = re(T::one());
        let nn = lit::<T>(n as f64);
        let sign = if n.is_multiple_of(2) { T::one() } else { -T::one() };
        let lt = t.ln();
        let r = mellin_barnes_integrate(
            |z| {
                let poch = (log_gamma(z + one + nn)? - log_gamma(z + one)?).exp();
                Ok(poch * (-(z + one + nn) * lt).exp() * self.mellin(z)? * sign)
            },
            line,
            self.envelope(),
        )?;
        Ok(AccuracyReport::new(r.report.value, r.report.abs_error + r.imag_residual))
    }

    /// `P(T₀ ≤ t) = (1/2πi) ∫ t^{-z}/(-z) E[T₀^z] dz` on a line with negative abscissa.
    pub fn cdf(&self, t: T, line: &MellinLine<T>) -> Result<AccuracyReport<T>> {
        if !(t > T::zero()) {
            return Err(Error::Domain(format!("cdf needs t > 0, got {t}")));
        }
        self.check_line(line)?;
        if !(line.abscissa < T::zero()) {
            return Err(Error::Strip { value: to_f64(line.abscissa), lower: to_f64(self.strip().0), upper: 0.0 });
        }
        let lt = t.ln();
        let r = mellin_barnes_integrate(|z| Ok((-z * lt).exp() / (-z) * self.mellin(z)?), line, self.envelope())?;
        Ok(AccuracyReport::new(r.report.value, r.report.abs_error + r.imag_residual))
    }

    /// `P(t < T₀ < ∞)`.
    pub fn survival(&self, t: T, line: &MellinLine<T>) -> Result<AccuracyReport<T>> {
        let c = self.cdf(t, line)?;
        Ok(AccuracyReport::new(self.mass()? - c.value, c.abs_error))
    }

    /// Density on a grid.
    pub fn density_grid(&self, ts: &[T], n: u32, line: &MellinLine<T>) -> Result<Vec<DensityPoint>> {
        ts.iter()
            .map(|&t| {
                let r = self.density(t, n, line)?;
                Ok(DensityPoint { t: to_f64(t), f: to_f64(r.value), err: r.abs_error })
            })
            .collect()
    }
}

/// `P(T₀ > t) ~ m t^{-α}/Γ(1-α)` as `t → ∞`, `m = E[T₀(X)]`.
pub fn tail_asymptote<T: Scalar>(m: T, alpha: T, t: T) -> Result<T> {
    Ok(m * t.powf(-alpha) / gamma(T::one() - alpha)?)
}

/// `E[T₀ ∧ t] = ∫_0^t P(T₀ > s) ds ~ m t^{1-α}/Γ(2-α)`.
pub fn truncated_mean_asymptote<T: Scalar>(m: T, alpha: T, t: T) -> Result<T> {
    Ok(m * t.powf(T::one() - alpha) / gamma(lit::<T>(2.0) - alpha)?)
}

/// `d^n/dt^n P(T₀ > t) ~ (-1)^n sin(απ)/π Γ(α+n) m t^{-α-n}`.
pub fn tail_derivative_asymptote<T: Scalar>(m: T, alpha: T, n: u32, t: T) -> Result<T> {
    let nn = lit::<T>(n as f64);
    let sign = if n.is_multiple_of(2) { T::one() } else { -T::one() };
    Ok(sign * (alpha * T::PI()).sin() / T::PI() * gamma(alpha + nn)? * m * t.powf(-alpha - nn))
}

/// Strictly stable `X` with index `𝔞` and positivity `ρ`, started at `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams<T> {
    pub index: T,
    pub rho: T,
    pub x: T,
}

impl<T: Scalar> StableParams<T> {
    pub fn new(index: T, rho: T, x: T) -> Result<Self> {
        let one = T::one();
        let two = lit::<T>(2.0);
        if !(index > T::zero() && index <= two) {
            return Err(Error::Model(format!("stable index must lie in (0,2], got {index}")));
        }
        if !(rho > T::zero() && rho < one) {
            return Err(Error::Model(format!("positivity parameter must lie in (0,1), got {rho}")));
        }
        if index > one && (rho < one - one / index || rho > one / index) {
            return Err(Error::Model(format!("need 1-1/𝔞 ≤ ρ ≤ 1/𝔞 for 𝔞 = {index}, got ρ = {rho}")));
        }
        if !(x > T::zero()) {
            return Err(Error::Domain(format!("start must be positive, got {x}")));
        }
        Ok(Self { index, rho, x })
    }

    fn tau(&self) -> T {
        T::one() / self.index
    }

    /// `φ⁺(z) = Γ(𝔞 + 𝔞z)/Γ(𝔞(1-ρ) + 𝔞z)`.
    pub fn phi_plus(&self, z: Complex<T>) -> Result<Complex<T>> {
        let a = self.index;
        Ok((log_gamma(z * a + a)? - log_gamma(z * a + a * (T::one() - self.rho))?).exp())
    }

    /// `φ⁻(z) = Γ(1 + 𝔞z)/Γ(1 - 𝔞(1-ρ) + 𝔞z)`.
    pub fn phi_minus(&self, z: Complex<T>) -> Result<Complex<T>> {
        let a = self.index;
        let one = re(T::one());
        Ok((log_gamma(one + z * a)? - log_gamma(one + z * a - a * (T::one() - self.rho))?).exp())
    }

    /// `log W⁺(z)`, `W⁺(z) = G(2-ρ)/G(2) · G(z+1)/G(z+1-ρ)`, so that `W⁺(1) = 1`.
    pub fn log_w_plus(&self, z: Complex<T>) -> Result<Complex<T>> {
        let tau = self.tau();
        let one = re(T::one());
        let two = re(lit::<T>(2.0));
        let rho = re(self.rho);
        Ok(log_barnes_g(two - rho, tau)? - log_barnes_g(two, tau)? + log_barnes_g(z + one, tau)?
            - log_barnes_g(z + one - rho, tau)?)
    }

    /// `log W⁻(z)`, `W⁻(z) = G(1/𝔞+ρ)/G(1/𝔞+1) · G(z+1/𝔞)/G(z+1/𝔞+ρ-1)`, so that `W⁻(1) = 1`.
    pub fn log_w_minus(&self, z: Complex<T>) -> Result<Complex<T>> {
        let tau = self.tau();
        let one = re(T::one());
        let rho = re(self.rho);
        let it = re(tau);
        Ok(log_barnes_g(it + rho, tau)? - log_barnes_g(it + one, tau)? + log_barnes_g(z + it, tau)?
            - log_barnes_g(z + it + rho - one, tau)?)
    }

    /// `E_x[Tm^w]` of the exit time `Tm = inf{t : X_t < 0}` of the untimed process,
    /// `x^{𝔞w} φ⁺(0) Γ(w+1) W⁺(-w)/W⁻(w+1)` for `-1 < Re w < 1-ρ`.
    pub fn exit_mellin(&self, w: Complex<T>) -> Result<Complex<T>> {
        let one = re(T::one());
        if !(w.re > -T::one() && w.re < T::one() - self.rho) {
            return Err(Error::Strip { value: to_f64(w.re), lower: -1.0, upper: to_f64(T::one() - self.rho) });
        }
        let zero = Complex::new(T::zero(), T::zero());
        let lg = (w * self.index) * self.x.ln() + self.phi_plus(zero)?.ln() + log_gamma(w + one)?
            + self.log_w_plus(-w)?
            - self.log_w_minus(w + one)?;
        Ok(lg.exp())
    }
}

impl<T: Scalar> BaseMellin<T> for StableParams<T> {
    fn mellin(&self, s: Complex<T>) -> Result<Complex<T>> {
        self.exit_mellin(s)
    }

    fn strip(&self) -> (T, T) {
        (-T::one(), T::one() - self.rho)
    }

    fn mean(&self) -> Option<T> {
        None
    }

    fn decay_rate(&self) -> f64 {
        let (a, r) = (to_f64(self.index), to_f64(self.rho));
        // |E[Tm^{c+ib}]| decays like exp(-|b| π (2 + 𝔞(2ρ-1))/2) net of the subordinator factor
        (std::f64::consts::FRAC_PI_2 * (1.0 + a * (2.0 * r - 1.0))).max(0.0)
    }
}

/// `E_x[T̂₀^z]` for the stable time change: `Γ(1-z/α)/Γ(1-z) · E_x[Tm^{z/α}]`,
/// `-α < Re z < α(1-ρ)`.
pub fn stable_mellin_hat_t0<T: Scalar>(sp: &StableParams<T>, alpha: T, z: Complex<T>) -> Result<Complex<T>> {
    FractionalProblem::new(alpha, *sp)?.mellin(z)
}

/// Spectrally negative stable `X` (`Ψ(-iu) = u^𝔞`, `𝔞 ∈ (1,2]`), exit time
/// below `0` from `x`: `E_x[Tm^w] = x^{𝔞w} sin(π/𝔞)/π Γ(1+w)Γ(w+1/𝔞)Γ(1-1/𝔞-w)/Γ(1+𝔞w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnStableExit<T> {
    pub index: T,
    pub x: T,
}

impl<T: Scalar> SnStableExit<T> {
    pub fn new(index: T, x: T) -> Result<Self> {
        if !(index > T::one() && index <= lit(2.0)) {
            return Err(Error::Model(format!("spectrally negative stable index must lie in (1,2], got {index}")));
        }
        if !(x > T::zero()) {
            return Err(Error::Domain(format!("start must be positive, got {x}")));
        }
        Ok(Self { index, x })
    }
}

impl<T: Scalar> BaseMellin<T> for SnStableExit<T> {
    fn mellin(&self, w: Complex<T>) -> Result<Complex<T>> {
        let (lo, hi) = self.strip();
        if !(w.re > lo && w.re < hi) {
            return Err(Error::Strip { value: to_f64(w.re), lower: to_f64(lo), upper: to_f64(hi) });
        }
        let a = self.index;
        let one = re(T::one());
        let ia = re(T::one() / a);
        let pref = (T::PI() / a).sin() / T::PI();
        let lg = (w * a) * self.x.ln() + log_gamma(one + w)? + log_gamma(w + ia)? + log_gamma(one - ia - w)?
            - log_gamma(one + w * a)?;
        Ok(lg.exp() * pref)
    }

    fn strip(&self) -> (T, T) {
        (-T::one() / self.index, T::one() - T::one() / self.index)
    }

    fn mean(&self) -> Option<T> {
        None
    }

    fn decay_rate(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 * (3.0 - to_f64(self.index))
    }
}

/// `E_x[T̂₀^z]` for spectrally negative stable `X` under the stable time change.
pub fn sn_stable_mellin_hat_t0<T: Scalar>(index: T, alpha: T, x: T, z: Complex<T>) -> Result<Complex<T>> {
    FractionalProblem::new(alpha, SnStableExit::new(index, x)?)?.mellin(z)
}

fn sn_series_coefficients<T: Scalar>(index: T, alpha: T, n: usize) -> Result<(T, T)> {
    let k = lit::<T>(n as f64 + 1.0);
    let j = k - T::one() / index;
    let a_n = -gamma(alpha * k)? / gamma(index * k)?;
    let b_n = -gamma(alpha * j)? / gamma(index * j)?;
    Ok((a_n, b_n))
}

fn check_sn_series<T: Scalar>(index: T, alpha: T, t: T) -> Result<()> {
    check_alpha(alpha)?;
    if !(index > T::one() && index <= lit(2.0)) {
        return Err(Error::Model(format!("spectrally negative stable index must lie in (1,2], got {index}")));
    }
    if !(t > T::zero()) {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    Ok(())
}

const SN_SERIES_MAX: usize = 400;

/// Density of `T̂₀` from `x = 1` by the large-`t` series
/// `(α/(𝔞π)) Σ [sin(απ(n+1)) a_n - sin(απ(n+1-1/𝔞)) b_n t^{α/𝔞}] t^{-α(n+1)-1}`,
/// truncated after `max_terms` terms or once terms fall below machine precision.
pub fn sn_stable_series_density<T: Scalar>(index: T, alpha: T, t: T, max_terms: usize) -> Result<AccuracyReport<T>> {
    check_sn_series(index, alpha, t)?;
    let pi = T::PI();
    let ta = t.powf(alpha / index);
    let mut sum = T::zero();
    let mut last = T::infinity();
    let mut small = 0;
    for n in 0..max_terms.clamp(1, SN_SERIES_MAX) {
        let k = lit::<T>(n as f64 + 1.0);
        let (a_n, b_n) = sn_series_coefficients(index, alpha, n)?;
        let term = ((alpha * pi * k).sin() * a_n - (alpha * pi * (k - T::one() / index)).sin() * b_n * ta)
            * t.powf(-alpha * k - T::one());
        sum += term;
        last = term.abs();
        if last <= T::epsilon() * sum.abs() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    let scale = alpha / (index * pi);
    Ok(AccuracyReport::new(sum * scale, to_f64(last * scale) + T::EPS_F64 * to_f64((sum * scale).abs())))
}

/// Leading (`n = 0`) term of the series density.
pub fn sn_stable_series_leading<T: Scalar>(index: T, alpha: T, t: T) -> Result<T> {
    sn_stable_series_density(index, alpha, t, 1).map(|r| r.value)
}

/// `P(T̂₀ > t)` from `x = 1`, integrating the series term by term on `(t, ∞)`.
pub fn sn_stable_series_survival<T: Scalar>(index: T, alpha: T, t: T, max_terms: usize) -> Result<AccuracyReport<T>> {
    check_sn_series(index, alpha, t)?;
    let pi = T::PI();
    let g = alpha / index;
    let mut sum = T::zero();
    let mut last = T::infinity();
    let mut small = 0;
    for n in 0..max_terms.clamp(1, SN_SERIES_MAX) {
        let k = lit::<T>(n as f64 + 1.0);
        let (a_n, b_n) = sn_series_coefficients(index, alpha, n)?;
        let ia = (alpha * pi * k).sin() * a_n * t.powf(-alpha * k) / (alpha * k);
        let ib = (alpha * pi * (k - T::one() / index)).sin() * b_n * t.powf(g - alpha * k) / (alpha * k - g);
        let term = ia - ib;
        sum += term;
        last = term.abs();
        if last <= T::epsilon() * sum.abs() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    let scale = alpha / (index * pi);
    Ok(AccuracyReport::new(sum * scale, to_f64(last * scale) + T::EPS_F64 * to_f64((sum * scale).abs())))
}

/// Density of `T̂₀` from `x = 1`: the series where its remainder estimate is
/// below the Mellin-route error, the Mellin inversion otherwise.
pub fn sn_stable_density<T: Scalar>(index: T, alpha: T, t: T, line: &MellinLine<T>) -> Result<AccuracyReport<T>> {
    let fp = FractionalProblem::new(alpha, SnStableExit::new(index, T::one())?)?;
    let mellin = fp.density(t, 0, line)?;
    match sn_stable_series_density(index, alpha, t, SN_SERIES_MAX) {
        Ok(s) if s.value.is_finite() && s.abs_error < mellin.abs_error => Ok(s),
        _ => Ok(mellin),
    }
}
