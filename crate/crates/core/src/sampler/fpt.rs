//! First-passage samplers for `T = inf{t : X_{ℓ_t} > a + K_t}`.
//!
//! * [`fpt_direct`] discretizes `X`, `Sub` on an operational grid and `K` on a
//!   physical grid, and compares `X_{ℓ_t}` with `a + K_t` at physical nodes.
//! * [`fpt_reduced`] simulates the reduced process `Xbs_t = X_t - K(Sub_t)`
//!   together with `Sub`, finds `τ = inf{t : Xbs_t > a}` and returns
//!   `T = Sub_τ` with overshoot `Xbs_τ - a`. When `X` is compound Poisson with
//!   no Gaussian part and `Xbs` cannot creep upwards between jumps, `τ` is
//!   located exactly at the jump epochs.

use std::fmt;
use std::io::Write;

use super::rng::RngStream;
use super::variates::{LevyStepper, SubStepper};
use crate::error::{Error, Result};
use crate::models::ProblemTriple;

/// Which sampler produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Reduced,
    /// Event-exact renewal simulation of the risk model.
    Renewal,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Reduced => "reduced",
            Method::Renewal => "renewal",
        })
    }
}

/// One draw of `(T, overshoot)`.
///
/// `finite = false` means no passage was observed. `censored` distinguishes
/// "stopped at the horizon" from a known infinite passage time; `elapsed` is
/// the physical time reached, a lower bound for `T` when censored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FptSample {
    pub time: f64,
    pub overshoot: f64,
    pub finite: bool,
    pub censored: bool,
    pub elapsed: f64,
    pub method: Method,
}

impl FptSample {
    pub(crate) fn hit(time: f64, overshoot: f64, method: Method) -> Self {
        Self { time, overshoot: overshoot.max(0.0), finite: true, censored: false, elapsed: time, method }
    }

    pub(crate) fn censored(elapsed: f64, method: Method) -> Self {
        Self { time: f64::INFINITY, overshoot: f64::NAN, finite: false, censored: true, elapsed, method }
    }
}

/// Write a batch as CSV `time,overshoot,finite,censored`.
pub fn write_samples_csv<W: Write>(samples: &[FptSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "overshoot", "finite", "censored"])?;
    for s in samples {
        w.write_record([s.time.to_string(), s.overshoot.to_string(), s.finite.to_string(), s.censored.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Discretization controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Operational-time step.
    pub op_step: f64,
    /// Operational-time horizon; samples not crossed by then are censored.
    pub op_horizon: f64,
    /// Brownian-bridge crossing correction between grid nodes.
    pub bridge: bool,
    /// Physical grid for the direct sampler (defaults to `op_step`).
    pub phys_step: Option<f64>,
    /// Optional physical-time cap; reaching it censors the sample.
    pub phys_horizon: Option<f64>,
}

impl SamplerConfig {
    pub fn new(op_step: f64, op_horizon: f64) -> Self {
        Self { op_step, op_horizon, bridge: false, phys_step: None, phys_horizon: None }
    }

    pub fn with_bridge(mut self, on: bool) -> Self {
        self.bridge = on;
        self
    }

    pub fn with_phys_step(mut self, dt: f64) -> Self {
        self.phys_step = Some(dt);
        self
    }

    pub fn with_phys_horizon(mut self, t: f64) -> Self {
        self.phys_horizon = Some(t);
        self
    }

    fn validate(&self) -> Result<usize> {
        if !(self.op_step > 0.0 && self.op_horizon > 0.0) || !self.op_horizon.is_finite() {
            return Err(Error::Domain(format!(
                "step and horizon must be positive, got {} and {}",
                self.op_step, self.op_horizon
            )));
        }
        if let Some(d) = self.phys_step {
            if !(d > 0.0) {
                return Err(Error::Domain("physical step must be positive".into()));
            }
        }
        Ok((self.op_horizon / self.op_step).ceil() as usize)
    }

    fn phys_cap(&self) -> f64 {
        self.phys_horizon.unwrap_or(f64::INFINITY)
    }
}

struct Steppers {
    x: LevyStepper,
    sub: SubStepper,
    k: SubStepper,
}

impl Steppers {
    fn new(problem: &ProblemTriple<f64>) -> Result<Self> {
        problem.time_change.validate_time_change()?;
        Ok(Self {
            x: LevyStepper::new(&problem.x_process),
            sub: SubStepper::new(&problem.time_change),
            k: SubStepper::new(&problem.boundary),
        })
    }

    /// `Xbs` can only move up through jumps of `X` (`sign` orients `X`).
    fn event_exact(&self, sign: f64) -> bool {
        self.x.is_pure_jump_finite() && sign * self.x.drift() <= self.k.drift() * self.sub.drift()
    }

    /// With `K ≡ 0` and no physical cap only `Sub` at the passage step matters,
    /// so it is drawn once at the end instead of per step.
    fn lazy_sub(&self, cap: f64) -> bool {
        self.k.is_zero() && !cap.is_finite()
    }

    #[inline]
    fn k_of(&self, ds: f64, rng: &mut RngStream) -> f64 {
        if self.k.is_zero() {
            0.0
        } else {
            self.k.step(ds, rng)
        }
    }
}

/// Brownian-bridge probability of exceeding `level` between two values below it.
#[inline]
fn bridge_probability(level: f64, x0: f64, x1: f64, var: f64) -> f64 {
    if var <= 0.0 {
        return 0.0;
    }
    (-2.0 * (level - x0) * (level - x1) / var).exp()
}

/// Reduced sampler: `T = Sub_τ`, `τ` the passage time of `Xbs` above the level.
pub fn fpt_reduced(problem: &ProblemTriple<f64>, cfg: &SamplerConfig, rng: &mut RngStream) -> Result<FptSample> {
    reduced(problem, cfg, rng, 1.0, problem.effective_level())
}

/// Dual passage `inf{t : X_{ℓ_t} < -a - K_t}` under `P_x`, simulated on `X` itself.
pub fn fpt_dual(problem: &ProblemTriple<f64>, cfg: &SamplerConfig, rng: &mut RngStream) -> Result<FptSample> {
    reduced(problem, cfg, rng, -1.0, problem.level + problem.start)
}

fn reduced(problem: &ProblemTriple<f64>, cfg: &SamplerConfig, rng: &mut RngStream, sign: f64, level: f64) -> Result<FptSample> {
    let n = cfg.validate()?;
    let st = Steppers::new(problem)?;
    if level < 0.0 {
        return Ok(FptSample::hit(0.0, -level, Method::Reduced));
    }
    if st.event_exact(sign) {
        return Ok(reduced_events(&st, cfg, rng, sign, level));
    }
    let dt = cfg.op_step;
    let var = st.x.sigma2() * dt;
    let use_bridge = cfg.bridge && var > 0.0;
    let cap = cfg.phys_cap();
    let lazy = st.lazy_sub(cap);
    let (mut xb, mut s, mut t) = (0.0f64, 0.0f64, 0.0f64);
    for i in 1..=n {
        let h = if i == n { cfg.op_horizon - (n - 1) as f64 * dt } else { dt };
        let dx = sign * st.x.step(h, rng);
        let ds = if lazy { 0.0 } else { st.sub.step(h, rng) };
        let dk = st.k_of(ds, rng);
        let u = if use_bridge { rng.uniform() } else { 1.0 };
        let x_new = xb + dx - dk;
        let s_new = s + ds;
        t += h;
        if x_new > level {
            let time = if lazy { st.sub.step(t, rng) } else { s_new };
            return Ok(FptSample::hit(time, x_new - level, Method::Reduced));
        }
        if use_bridge && u < bridge_probability(level, xb, x_new, st.x.sigma2() * h) {
            let time = if lazy { st.sub.step(t, rng) } else { s_new };
            return Ok(FptSample::hit(time, 0.0, Method::Reduced));
        }
        xb = x_new;
        s = s_new;
        if s > cap {
            return Ok(FptSample::censored(s, Method::Reduced));
        }
    }
    if lazy {
        s = st.sub.step(cfg.op_horizon, rng);
    }
    Ok(FptSample::censored(s, Method::Reduced))
}

fn reduced_events(st: &Steppers, cfg: &SamplerConfig, rng: &mut RngStream, sign: f64, level: f64) -> FptSample {
    let lam = st.x.total_intensity();
    let drift = sign * st.x.drift();
    let cap = cfg.phys_cap();
    let (mut xb, mut s, mut t) = (0.0f64, 0.0f64, 0.0f64);
    if lam <= 0.0 || !st.x.has_upward_jumps(sign) {
        // No upward jumps: the level is never reached.
        let ds = st.sub.step(cfg.op_horizon, rng);
        return FptSample::censored(ds, Method::Reduced);
    }
    loop {
        let gap = rng.exp1() / lam;
        if t + gap > cfg.op_horizon {
            s += st.sub.step(cfg.op_horizon - t, rng);
            return FptSample::censored(s, Method::Reduced);
        }
        t += gap;
        let ds = st.sub.step(gap, rng);
        let dk = st.k_of(ds, rng);
        xb += drift * gap - dk;
        s += ds;
        xb += sign * st.x.jump(rng);
        if xb > level {
            return FptSample::hit(s, xb - level, Method::Reduced);
        }
        if s > cap {
            return FptSample::censored(s, Method::Reduced);
        }
    }
}

/// Reduced sampler at steps `h` and `h/2` driven by the same random numbers.
///
/// The coarse path uses the sums of consecutive pairs of fine increments, so
/// the difference of the two estimates isolates the discretization bias.
pub fn fpt_reduced_halving(problem: &ProblemTriple<f64>, cfg: &SamplerConfig, rng: &mut RngStream) -> Result<(FptSample, FptSample)> {
    let n = cfg.validate()?;
    let st = Steppers::new(problem)?;
    let level = problem.effective_level();
    if level < 0.0 || st.event_exact(1.0) {
        let s = reduced(problem, cfg, rng, 1.0, level)?;
        return Ok((s, s));
    }
    let h = cfg.op_step / 2.0;
    let sigma2 = st.x.sigma2();
    let use_bridge = cfg.bridge && sigma2 > 0.0;
    let cap = cfg.phys_cap();
    let lazy = st.lazy_sub(cap);
    let (mut xf, mut sf) = (0.0f64, 0.0f64);
    let (mut xc, mut sc) = (0.0f64, 0.0f64);
    let (mut tf, mut tc) = (0.0f64, 0.0f64);
    let mut fine: Option<FptSample> = None;
    let mut coarse: Option<FptSample> = None;
    for _ in 0..n {
        let (mut dxc, mut dsc) = (0.0, 0.0);
        for _ in 0..2 {
            let dx = st.x.step(h, rng);
            let ds = if lazy { 0.0 } else { st.sub.step(h, rng) };
            let dk = st.k_of(ds, rng);
            let u = if use_bridge { rng.uniform() } else { 1.0 };
            dxc += dx - dk;
            dsc += ds;
            if fine.is_none() {
                tf += h;
                let x_new = xf + dx - dk;
                let s_new = sf + ds;
                if x_new > level {
                    fine = Some(FptSample::hit(s_new, x_new - level, Method::Reduced));
                } else if use_bridge && u < bridge_probability(level, xf, x_new, sigma2 * h) {
                    fine = Some(FptSample::hit(s_new, 0.0, Method::Reduced));
                } else if s_new > cap {
                    fine = Some(FptSample::censored(s_new, Method::Reduced));
                }
                xf = x_new;
                sf = s_new;
            }
        }
        let u = if use_bridge { rng.uniform() } else { 1.0 };
        if coarse.is_none() {
            tc += cfg.op_step;
            let x_new = xc + dxc;
            let s_new = sc + dsc;
            if x_new > level {
                coarse = Some(FptSample::hit(s_new, x_new - level, Method::Reduced));
            } else if use_bridge && u < bridge_probability(level, xc, x_new, sigma2 * cfg.op_step) {
                coarse = Some(FptSample::hit(s_new, 0.0, Method::Reduced));
            } else if s_new > cap {
                coarse = Some(FptSample::censored(s_new, Method::Reduced));
            }
            xc = x_new;
            sc = s_new;
        }
        if fine.is_some() && coarse.is_some() {
            break;
        }
    }
    let mut coarse = coarse.unwrap_or(FptSample::censored(sc, Method::Reduced));
    let mut fine = fine.unwrap_or(FptSample::censored(sf, Method::Reduced));
    if lazy {
        // one subordinator path evaluated at both operational passage times
        let (lo, hi) = (tf.min(tc), tf.max(tc));
        let s_lo = st.sub.step(lo, rng);
        let s_hi = s_lo + st.sub.step(hi - lo, rng);
        for (smp, t) in [(&mut fine, tf), (&mut coarse, tc)] {
            let v = if t == lo { s_lo } else { s_hi };
            if smp.censored {
                smp.elapsed = v;
            } else {
                smp.time = v;
                smp.elapsed = v;
            }
        }
    }
    Ok((coarse, fine))
}

/// Direct sampler on the time-changed path.
///
/// At operational step `k` the path `X_{ℓ_t}` is represented by `X` at the
/// right node for physical times in `[Sub_{k-1}, Sub_k)`; only the first
/// physical node in that interval is compared with `a + K_t`, where the
/// boundary is lowest.
pub fn fpt_direct(problem: &ProblemTriple<f64>, cfg: &SamplerConfig, rng: &mut RngStream) -> Result<FptSample> {
    let n = cfg.validate()?;
    let st = Steppers::new(problem)?;
    let level = problem.effective_level();
    if level < 0.0 {
        return Ok(FptSample::hit(0.0, -level, Method::Direct));
    }
    let dt = cfg.op_step;
    let big_delta = cfg.phys_step.unwrap_or(dt);
    let cap = cfg.phys_cap();
    let (mut x, mut s) = (0.0f64, 0.0f64);
    // boundary K on the physical grid, advanced lazily
    let mut k_node = 0u64;
    let mut k_val = 0.0f64;
    for i in 1..=n {
        let h = if i == n { cfg.op_horizon - (n - 1) as f64 * dt } else { dt };
        let dx = st.x.step(h, rng);
        let ds = st.sub.step(h, rng);
        let x_new = x + dx;
        let s_new = s + ds;
        let j = (s / big_delta).ceil() as u64;
        let tj = j as f64 * big_delta;
        if tj < s_new {
            if !st.k.is_zero() {
                while k_node < j {
                    k_val += st.k.step(big_delta, rng);
                    k_node += 1;
                }
            }
            let bound = level + k_val;
            if x_new > bound {
                return Ok(FptSample::hit(tj, x_new - bound, Method::Direct));
            }
        }
        x = x_new;
        s = s_new;
        if s > cap {
            return Ok(FptSample::censored(s, Method::Direct));
        }
    }
    Ok(FptSample::censored(s, Method::Direct))
}

/// Outcome of a two-sided exit experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitSample {
    pub time: f64,
    pub upper: bool,
    pub finite: bool,
}

/// Exit of `X_ℓ` from `(lower, a)` started at `x`, with `K ≡ 0`.
///
/// Reduced grid scheme with bridge corrections on both barriers.
pub fn exit_two_barrier(problem: &ProblemTriple<f64>, lower: f64, cfg: &SamplerConfig, rng: &mut RngStream) -> Result<ExitSample> {
    let n = cfg.validate()?;
    if !problem.boundary.is_identically_zero() {
        return Err(Error::Model("two-sided exit is only defined with a zero boundary subordinator".into()));
    }
    let (a, x0) = (problem.level, problem.start);
    if !(lower < x0 && x0 <= a) {
        return Err(Error::Domain(format!("need lower < start <= level, got {lower}, {x0}, {a}")));
    }
    let st = Steppers::new(problem)?;
    let sigma2 = st.x.sigma2();
    let use_bridge = cfg.bridge && sigma2 > 0.0;
    let dt = cfg.op_step;
    let (mut x, mut s) = (x0, 0.0f64);
    for i in 1..=n {
        let h = if i == n { cfg.op_horizon - (n - 1) as f64 * dt } else { dt };
        let dx = st.x.step(h, rng);
        let ds = st.sub.step(h, rng);
        let (u1, u2) = if use_bridge { (rng.uniform(), rng.uniform()) } else { (1.0, 1.0) };
        let x_new = x + dx;
        let s_new = s + ds;
        if x_new > a || (use_bridge && u1 < bridge_probability(a, x, x_new, sigma2 * h)) {
            return Ok(ExitSample { time: s_new, upper: true, finite: true });
        }
        if x_new < lower || (use_bridge && u2 < bridge_probability(-lower, -x, -x_new, sigma2 * h)) {
            return Ok(ExitSample { time: s_new, upper: false, finite: true });
        }
        x = x_new;
        s = s_new;
    }
    Ok(ExitSample { time: f64::INFINITY, upper: false, finite: false })
}
