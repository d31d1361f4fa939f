//! Renewal risk model with time-changed claims and exponential claim sizes.
//!
//! Claims arrive at rate `λ` in operational time, so physical interarrival
//! times have transform `λ/(λ + φ_Sub(u))` (Mittag-Leffler for a stable
//! `Sub`). Claims are `Exp(p)`, capital grows by `K_t` (premium `δt` by
//! default) and ruin is `T_a = inf{t : X_{ℓ_t} > a + K_t}`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::models::{drifts_to_minus_infinity, DriftVerdict, ProblemTriple, SubJumps, SubordinatorModel};
use crate::sampler::rng::RngStream;
use crate::sampler::variates::{mittag_leffler_waiting_time, SubStepper};
use crate::sampler::{FptSample, Method};
use crate::scalar::{lit, Scalar};
use crate::special::roots::bracketed_root;
use crate::wiener_hopf::{claims_model, solve_root};

/// Claim rate `λ`, claim parameter `p`, time change `Sub` and capital inflow `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskModel<T> {
    pub lambda: T,
    pub p: T,
    pub time_change: SubordinatorModel<T>,
    pub capital: SubordinatorModel<T>,
}

impl<T: Scalar> RiskModel<T> {
    pub fn new(lambda: T, p: T, time_change: SubordinatorModel<T>, capital: SubordinatorModel<T>) -> Result<Self> {
        if !(lambda > T::zero()) || !(p > T::zero()) || !lambda.is_finite() || !p.is_finite() {
            return Err(Error::Model(format!("need λ > 0 and p > 0, got λ = {lambda}, p = {p}")));
        }
        time_change.validate_time_change()?;
        Ok(Self { lambda, p, time_change, capital })
    }

    /// Stable time change of index `alpha` and premium rate `delta`.
    pub fn fractional(lambda: T, p: T, delta: T, alpha: T) -> Result<Self> {
        let capital = if delta == T::zero() { SubordinatorModel::zero() } else { SubordinatorModel::pure_drift(delta)? };
        Self::new(lambda, p, SubordinatorModel::stable(alpha)?, capital)
    }

    /// Premium rate `δ` (drift of `K`).
    pub fn delta(&self) -> T {
        self.capital.drift()
    }

    /// The first-passage problem at initial capital `a`.
    pub fn problem(&self, a: T) -> Result<ProblemTriple<T>> {
        ProblemTriple::new(
            claims_model(self.lambda, self.p)?,
            self.time_change,
            self.capital,
            a,
            T::zero(),
        )
    }

    /// `Some(α)` when `Sub` is a driftless stable subordinator and `K` a pure drift.
    fn fast_path(&self) -> Option<T> {
        match (self.time_change.jumps(), self.capital.jumps()) {
            (SubJumps::Stable { alpha }, SubJumps::None) if self.time_change.drift() == T::zero() => Some(alpha),
            _ => None,
        }
    }
}

/// `E[exp(-u J)] = λ/(λ + φ_Sub(u))` for a physical interarrival time `J`.
pub fn holding_time_lt<T: Scalar>(model: &RiskModel<T>, u: T) -> Result<T> {
    if !(u >= T::zero()) {
        return Err(Error::Domain(format!("u must be >= 0, got {u}")));
    }
    Ok(model.lambda / (model.lambda + model.time_change.phi_real(u)?))
}

/// Root `R_q ∈ (0, p)` of `λR/(p-R) = φ_Sub(φ_K(R) + q)`,
/// i.e. `λR/(p-R) - (δR + q)^α = 0` for the stable/drift case.
pub fn solve_rq<T: Scalar>(model: &RiskModel<T>, q: T) -> Result<T> {
    if !(q >= T::zero()) || !q.is_finite() {
        return Err(Error::Domain(format!("q must be >= 0, got {q}")));
    }
    match model.fast_path() {
        Some(alpha) => solve_rq_stable(model.lambda, model.p, model.delta(), alpha, q),
        None => {
            let problem = model.problem(T::zero())?;
            let varrho = model.time_change.phi_real(q)?;
            solve_root(&problem.composite(q)?, varrho)
        }
    }
}

fn solve_rq_stable<T: Scalar>(lambda: T, p: T, delta: T, alpha: T, q: T) -> Result<T> {
    let f = |r: T| -> Result<T> { Ok(lambda * r / (p - r) - (delta * r + q).powf(alpha)) };
    let two = lit::<T>(2.0);
    let mut hi = p / two;
    for _ in 0..200 {
        if f(hi)? > T::zero() {
            break;
        }
        hi = (hi + p) / two;
    }
    if !(f(hi)? > T::zero()) {
        return Err(Error::Bracket("no positive value below p".into()));
    }
    let mut lo = T::zero();
    if q == T::zero() {
        let mut r = hi;
        let mut found = false;
        for _ in 0..1000 {
            r /= two;
            if r == T::zero() {
                break;
            }
            if f(r)? < T::zero() {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::NoRoot("λR/(p-R) > (δR)^α on (0, p): ruin is certain".into()));
        }
        lo = r;
    }
    bracketed_root(f, lo, hi, T::zero())
}

/// `P(T_a < ∞) = ((p - R₀)/p) e^{-R₀ a}` when the reduced process drifts to `-∞`, else 1.
pub fn ruin_probability<T: Scalar>(model: &RiskModel<T>, a: T) -> Result<T> {
    if !(a >= T::zero()) {
        return Err(Error::Domain(format!("initial capital must be >= 0, got {a}")));
    }
    let verdict = drifts_to_minus_infinity(&model.problem(a)?);
    if verdict == DriftVerdict::No {
        return Ok(T::one());
    }
    match solve_rq(model, T::zero()) {
        Ok(r) => Ok((model.p - r) / model.p * (-r * a).exp()),
        Err(Error::NoRoot(_)) if verdict == DriftVerdict::Undetermined => Ok(T::one()),
        Err(e) => Err(e),
    }
}

/// `E[exp(-q T_a); overshoot ≤ y] = ((p - R_q)/p) e^{-R_q a} (1 - e^{-p y})`.
pub fn joint_transform<T: Scalar>(model: &RiskModel<T>, a: T, q: T, y: T) -> Result<T> {
    if !(q > T::zero()) {
        return Err(Error::Domain(format!("q must be > 0, got {q}")));
    }
    if !(a >= T::zero()) || !(y > T::zero()) {
        return Err(Error::Domain(format!("need a >= 0 and y > 0, got a = {a}, y = {y}")));
    }
    let r = solve_rq(model, q)?;
    Ok((model.p - r) / model.p * (-r * a).exp() * (T::one() - (-model.p * y).exp()))
}

/// Ruin probabilities on a grid of initial capitals.
pub fn ruin_sweep<T: Scalar>(model: &RiskModel<T>, grid: &[T]) -> Result<Vec<(T, T)>> {
    grid.iter().map(|&a| Ok((a, ruin_probability(model, a)?))).collect()
}

/// CSV with header `a,ruinProb`.
pub fn write_ruin_csv<T: Scalar, W: Write>(rows: &[(T, T)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a", "ruinProb"])?;
    for (a, r) in rows {
        w.write_record([a.to_string(), r.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Event-exact simulation of one risk path started from capital `a`.
///
/// Ruin can only happen at claim instants. Paths that survive `max_claims`
/// claims are returned censored.
pub fn simulate_ruin(model: &RiskModel<f64>, a: f64, max_claims: usize, rng: &mut RngStream) -> Result<FptSample> {
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("initial capital must be >= 0, got {a}")));
    }
    let ml = model.fast_path();
    let sub = SubStepper::new(&model.time_change);
    let cap = SubStepper::new(&model.capital);
    let (mut t, mut claims, mut capital) = (0.0, 0.0, 0.0);
    for _ in 0..max_claims {
        let w = match ml {
            Some(alpha) => mittag_leffler_waiting_time(alpha, model.lambda, rng)?,
            None => sub.step(rng.exp1() / model.lambda, rng),
        };
        t += w;
        capital += cap.step(w, rng);
        claims += rng.exp1() / model.p;
        if claims > a + capital {
            return Ok(FptSample::hit(t, claims - a - capital, Method::Renewal));
        }
    }
    Ok(FptSample::censored(t, Method::Renewal))
}

/// Batch of `n` renewal paths on stream `(seed, stream)`.
pub fn simulate_ruin_batch(
    model: &RiskModel<f64>,
    a: f64,
    n: usize,
    max_claims: usize,
    rng: &mut RngStream,
) -> Result<Vec<FptSample>> {
    (0..n).map(|_| simulate_ruin(model, a, max_claims, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quadrature::exp_sinh;
    use crate::wiener_hopf::composite_rhs_q0;

    fn bench() -> RiskModel<f64> {
        RiskModel::fractional(1.0, 1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn holding_time() {
        let m = bench();
        assert_eq!(holding_time_lt(&m, 0.0).unwrap(), 1.0);
        assert!((holding_time_lt(&m, 4.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let e = RiskModel::new(1.0, 1.0, SubordinatorModel::pure_drift(1.0).unwrap(), SubordinatorModel::zero()).unwrap();
        assert!((holding_time_lt(&e, 1.0).unwrap() - 0.5f64).abs() < 1e-15);
    }

    #[test]
    fn roots() {
        let m = bench();
        let r0 = solve_rq(&m, 0.0).unwrap();
        assert!((r0 - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let mut prev = 0.0;
        for &q in &[10.0, 100.0, 1000.0] {
            let r = solve_rq(&m, q).unwrap();
            assert!(r > prev && r < 1.0);
            prev = r;
        }
        assert!(prev > 0.9);
        let g = RiskModel::fractional(1.0, 1.0, 0.0, 0.5).unwrap();
        assert!((solve_rq(&g, 1.0).unwrap() - 0.5f64).abs() < 1e-12);
        assert!(matches!(solve_rq(&g, 0.0), Err(Error::NoRoot(_))));
    }

    #[test]
    fn general_route_agrees() {
        let m = bench();
        for &q in &[0.0, 0.5, 3.0] {
            let fast = solve_rq(&m, q).unwrap();
            let general = solve_root(&m.problem(0.0).unwrap().composite(q).unwrap(), q.powf(0.5)).unwrap();
            assert!((fast - general).abs() < 1e-10, "q={q}: {fast} vs {general}");
        }
        // tempered stable time change goes through the general solver
        let t = RiskModel::new(
            1.0,
            1.0,
            SubordinatorModel::new(0.0, SubJumps::TemperedStable { alpha: 0.5, theta: 1.0 }).unwrap(),
            SubordinatorModel::pure_drift(2.0).unwrap(),
        )
        .unwrap();
        let r = solve_rq(&t, 1.0).unwrap();
        let lhs = r / (1.0 - r);
        let rhs = (2.0 * r + 1.0 + 1.0f64).powf(0.5) - 1.0;
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn ruin_values() {
        let m = bench();
        assert!((ruin_probability(&m, 0.0).unwrap() - 0.6180339887498949).abs() < 1e-12);
        let r0 = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((ruin_probability(&m, 1.0).unwrap() - (1.0 - r0) * (-r0).exp()).abs() < 1e-12);
        let sure = RiskModel::new(2.0, 1.0, SubordinatorModel::pure_drift(1.0).unwrap(), SubordinatorModel::pure_drift(1.0).unwrap())
            .unwrap();
        assert_eq!(ruin_probability(&sure, 3.0).unwrap(), 1.0);
        assert_eq!(ruin_probability(&RiskModel::fractional(1.0, 1.0, 0.0, 0.5).unwrap(), 3.0).unwrap(), 1.0);
    }

    #[test]
    fn ruin_monotonicity() {
        let grid: Vec<f64> = (0..20).map(|k| 0.25 * k as f64).collect();
        let rows = ruin_sweep(&bench(), &grid).unwrap();
        assert!(rows.windows(2).all(|w| w[1].1 < w[0].1));
        let mut prev_l = 0.0;
        for &l in &[0.5, 1.0, 2.0] {
            let v = ruin_probability(&RiskModel::fractional(l, 1.0, 1.0, 0.5).unwrap(), 1.0).unwrap();
            assert!(v > prev_l);
            prev_l = v;
        }
        let mut prev_d = 1.0;
        for &d in &[0.5, 1.0, 2.0] {
            let v = ruin_probability(&RiskModel::fractional(1.0, 1.0, d, 0.5).unwrap(), 1.0).unwrap();
            assert!(v < prev_d);
            prev_d = v;
        }
    }

    #[test]
    fn defect_identity_and_transform() {
        let m = bench();
        let a = 1.3;
        let lim = joint_transform(&m, a, 1e-12, f64::INFINITY).unwrap();
        assert!((lim - ruin_probability(&m, a).unwrap()).abs() < 1e-5);
        let full = joint_transform(&m, a, 1.0, f64::INFINITY).unwrap();
        let r = solve_rq(&m, 1.0).unwrap();
        assert!((full - (1.0 - r) * (-r * a).exp()).abs() < 1e-15);
        assert!(joint_transform(&m, a, 0.0, 1.0).is_err());
    }

    #[test]
    fn laplace_in_level() {
        let m = bench();
        let pl = 2.0;
        let int = exp_sinh(|a: f64| pl * (-pl * a).exp() * ruin_probability(&m, a).unwrap(), 0.0, 1e-13)
            .unwrap()
            .value;
        let rhs = composite_rhs_q0(&m.problem(0.0).unwrap(), pl, 0.0).unwrap();
        assert!((int - rhs).abs() < 1e-10, "{int} vs {rhs}");
    }

    #[test]
    fn renewal_mc_matches_ruin() {
        let m = bench();
        let mut rng = RngStream::new(21, 0);
        let n = 20000;
        let batch = simulate_ruin_batch(&m, 1.0, n, 1000, &mut rng).unwrap();
        let hits = batch.iter().filter(|s| s.finite).count() as f64 / n as f64;
        let se = (hits * (1.0 - hits) / n as f64).sqrt();
        let exact = ruin_probability(&m, 1.0).unwrap();
        assert!((hits - exact).abs() < 4.0 * se + 1e-3, "{hits} vs {exact}");
        assert!(batch.iter().all(|s| s.method == Method::Renewal));
    }

    #[test]
    fn ruin_csv() {
        let mut buf = Vec::new();
        write_ruin_csv(&ruin_sweep(&bench(), &[0.0, 1.0]).unwrap(), &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("a,ruinProb\n0,0.618033988749"));
    }
}
