//! Monte Carlo harness: deterministic parallel ensembles, estimators with
//! standard errors, Kolmogorov-Smirnov tests and correlation intervals.
//!
//! Sample `i` of an ensemble always draws from `RngStream::new(seed, i)`, so a
//! batch is bit-identical whatever the number of workers.

use std::num::NonZeroUsize;
use std::thread;

use crate::error::{Error, Result};
use crate::models::ProblemTriple;
use crate::sampler::{fpt_direct, fpt_dual, fpt_reduced, FptSample, RngStream, SamplerConfig};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Environment variable read by [`default_workers`].
pub const THREADS_ENV: &str = "SUBFPT_THREADS";

/// A sample mean with its standard error.
///
/// `bias_bound` bounds the contribution censored samples could have added;
/// the true mean lies in `[value, value + bias_bound]` up to sampling error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
    pub censored_fraction: f64,
    pub bias_bound: f64,
}

impl Estimate {
    /// Mean and standard error (sample variance, `n - 1` denominator).
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let n = values.len();
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let var = if n > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0) } else { 0.0 };
        Ok(Self { value: mean, std_error: (var / nf).sqrt(), n, censored_fraction: 0.0, bias_bound: 0.0 })
    }

    /// `value ± z · std_error`.
    pub fn ci(&self, z: f64) -> (f64, f64) {
        (self.value - z * self.std_error, self.value + z * self.std_error)
    }

    pub fn ci95(&self) -> (f64, f64) {
        self.ci(Z95)
    }

    /// Whether `target` lies within `k` standard errors plus `extra`, widened by the censoring bound.
    pub fn agrees_with(&self, target: f64, k: f64, extra: f64) -> bool {
        let lo = self.value - k * self.std_error - extra;
        let hi = self.value + self.bias_bound + k * self.std_error + extra;
        target >= lo && target <= hi
    }
}

/// Mean of `exp(-q·time - v·overshoot)·1{finite}`; censored samples contribute 0
/// and at most `exp(-q·elapsed)` each to `bias_bound`.
pub fn estimate_lt(samples: &[FptSample], q: f64, v: f64) -> Result<Estimate> {
    if !(q >= 0.0) || !(v >= 0.0) {
        return Err(Error::Domain(format!("need q, v >= 0, got q = {q}, v = {v}")));
    }
    let vals: Vec<f64> = samples
        .iter()
        .map(|s| if s.finite { (-q * s.time - v * s.overshoot).exp() } else { 0.0 })
        .collect();
    let mut e = Estimate::from_values(&vals)?;
    let cens: Vec<&FptSample> = samples.iter().filter(|s| s.censored).collect();
    e.censored_fraction = cens.len() as f64 / samples.len() as f64;
    e.bias_bound = cens.iter().map(|s| (-q * s.elapsed).exp()).sum::<f64>() / samples.len() as f64;
    Ok(e)
}

/// Empirical `P(T < ∞)`.
pub fn estimate_passage_probability(samples: &[FptSample]) -> Result<Estimate> {
    estimate_lt(samples, 0.0, 0.0)
}

/// Outcome of a Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Effective sample size `n` or `nm/(n+m)`.
    pub effective_n: f64,
}

impl KsResult {
    /// Whether the null hypothesis is rejected at `level`.
    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }
}

/// `Q_KS(λ) = 2 Σ_{j≥1} (-1)^{j-1} exp(-2 j² λ²)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1.18 {
        // Jacobi theta form converges quickly for small λ
        if lambda <= 0.0 {
            return 1.0;
        }
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let s: f64 = (0..20).map(|k| y.powi((2 * k + 1) * (2 * k + 1))).sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p(d: f64, ne: f64) -> f64 {
    let sq = ne.sqrt();
    kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)
}

fn sorted(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN in KS batch".into()));
    }
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample KS test of `x` against the continuous CDF `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(x: &[f64], cdf: F) -> Result<KsResult> {
    let v = sorted(x)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &xi) in v.iter().enumerate() {
        let f = cdf(xi);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult { statistic: d, p_value: ks_p(d, n), effective_n: n })
}

/// Two-sample KS test.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> Result<KsResult> {
    let (a, b) = (sorted(x)?, sorted(y)?);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = n * m / (n + m);
    Ok(KsResult { statistic: d, p_value: ks_p(d, ne), effective_n: ne })
}

/// Pearson correlation with a Fisher-z confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    pub n: usize,
    pub ci: (f64, f64),
}

impl Correlation {
    pub fn contains(&self, rho: f64) -> bool {
        rho >= self.ci.0 && rho <= self.ci.1
    }
}

/// Sample correlation of paired data with a `z`-level Fisher interval.
pub fn pearson(x: &[f64], y: &[f64], z: f64) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!("paired batches differ in length: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 4 {
        return Err(Error::Domain("correlation needs at least 4 pairs".into()));
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Domain("constant batch has no correlation".into()));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let fz = r.clamp(-1.0 + 1e-15, 1.0 - 1e-15).atanh();
    let h = z / (n - 3.0).sqrt();
    Ok(Correlation { r, n: x.len(), ci: ((fz - h).tanh(), (fz + h).tanh()) })
}

/// Worker count from `SUBFPT_THREADS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1))
}

/// `f(i, RngStream::new(seed, i))` for `i < n`, in index order, on `workers`
/// threads each owning a contiguous block of indices.
pub fn parallel_map<R, F>(n: usize, workers: usize, seed: u64, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize, &mut RngStream) -> Result<R> + Sync,
{
    let workers = workers.clamp(1, n.max(1));
    let chunk = n.div_ceil(workers);
    let run = |lo: usize, hi: usize| -> Result<Vec<R>> {
        (lo..hi)
            .map(|i| {
                let mut rng = RngStream::new(seed, i as u64);
                f(i, &mut rng)
            })
            .collect()
    };
    if workers == 1 {
        return run(0, n);
    }
    let parts: Vec<Result<Vec<R>>> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (lo, hi) = ((w * chunk).min(n), ((w + 1) * chunk).min(n));
                let run = &run;
                s.spawn(move || run(lo, hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Which first-passage sampler an ensemble runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Direct,
    Reduced,
    Dual,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "reduced" => Ok(Self::Reduced),
            "dual" => Ok(Self::Dual),
            other => Err(Error::Domain(format!("unknown sampler '{other}' (direct, reduced, dual)"))),
        }
    }
}

/// `n` first-passage samples of `problem`, sample `i` on stream `(seed, i)`.
pub fn run_ensemble(
    problem: &ProblemTriple<f64>,
    kind: SamplerKind,
    cfg: &SamplerConfig,
    n: usize,
    workers: usize,
    seed: u64,
) -> Result<Vec<FptSample>> {
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    let sampler = match kind {
        SamplerKind::Direct => fpt_direct,
        SamplerKind::Reduced => fpt_reduced,
        SamplerKind::Dual => fpt_dual,
    };
    parallel_map(n, workers, seed, |_, rng| sampler(problem, cfg, rng))
}
