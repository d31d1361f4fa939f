//! Grid paths of `Sub`, `X`, the inverse `ℓ` and the subdiffusive process `X_ℓ`.

use std::fmt;
use std::io::Write;

use super::rng::RngStream;
use super::variates::{LevyStepper, SubStepper};
use crate::error::{Error, Result};
use crate::models::{LevyModel, SubJumps, SubordinatorModel};

/// What a [`PathRecord`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Sub,
    Levy,
    Inverse,
    Subdiffusive,
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathKind::Sub => "sub",
            PathKind::Levy => "levy",
            PathKind::Inverse => "inverse",
            PathKind::Subdiffusive => "subdiffusive",
        })
    }
}

/// Piecewise path: at node `i` the value is `values[i]` (right limit) and
/// `left_limits[i]` (left limit); between nodes the path is linear from
/// `values[i]` to `left_limits[i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub left_limits: Vec<f64>,
    pub kind: PathKind,
}

impl PathRecord {
    /// Continuous piecewise-linear path through the given nodes.
    pub fn continuous(times: Vec<f64>, values: Vec<f64>, kind: PathKind) -> Result<Self> {
        let left_limits = values.clone();
        Self::from_parts(times, values, left_limits, kind)
    }

    pub fn from_parts(times: Vec<f64>, values: Vec<f64>, left_limits: Vec<f64>, kind: PathKind) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() || times.len() != left_limits.len() {
            return Err(Error::Domain("path arrays must be nonempty and of equal length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("path times must be strictly increasing".into()));
        }
        if matches!(kind, PathKind::Sub | PathKind::Inverse) {
            let mono = (1..values.len()).all(|i| left_limits[i] >= values[i - 1] && values[i] >= left_limits[i]);
            if !mono {
                return Err(Error::Domain(format!("{kind} path must be nondecreasing")));
            }
        }
        Ok(Self { times, values, left_limits, kind })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn terminal_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn terminal_value(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    /// Index of the last node with `times[i] <= s`.
    fn segment(&self, s: f64) -> usize {
        match self.times.partition_point(|&t| t <= s) {
            0 => 0,
            k => k - 1,
        }
    }

    /// Right-continuous value at `s`.
    pub fn value_at(&self, s: f64) -> f64 {
        let i = self.segment(s);
        if i + 1 >= self.len() || s <= self.times[i] {
            return self.values[i];
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        self.values[i] + (self.left_limits[i + 1] - self.values[i]) * (s - t0) / (t1 - t0)
    }

    /// Left limit at `s`.
    pub fn left_limit_at(&self, s: f64) -> f64 {
        let k = self.times.partition_point(|&t| t < s);
        if k < self.len() && self.times[k] == s {
            return self.left_limits[k];
        }
        self.value_at(s)
    }

    /// `inf{s : path_s > t}` for a nondecreasing path.
    pub fn first_exceedance(&self, t: f64) -> Result<f64> {
        if t >= self.terminal_value() {
            return Err(Error::Horizon { requested: t, horizon: self.terminal_value() });
        }
        let j = self.values.partition_point(|&v| v <= t);
        if j == 0 {
            return Ok(self.times[0]);
        }
        let (v0, l1) = (self.values[j - 1], self.left_limits[j]);
        if l1 > t {
            let (t0, t1) = (self.times[j - 1], self.times[j]);
            Ok(t0 + (t - v0) / (l1 - v0) * (t1 - t0))
        } else {
            Ok(self.times[j])
        }
    }

    /// CSV with header `t,value,kind`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value", "kind"])?;
        let kind = self.kind.to_string();
        for (t, v) in self.times.iter().zip(&self.values) {
            w.write_record([t.to_string(), v.to_string(), kind.clone()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_grid(horizon: f64, step: f64) -> Result<usize> {
    if !(horizon > 0.0 && step > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!("horizon and step must be positive, got {horizon}, {step}")));
    }
    Ok((horizon / step).ceil() as usize)
}

/// Grid path of a subordinator in the time-change role.
///
/// Stable and tempered jumps are aggregated per step (the path is flat and
/// jumps at the right node); compound Poisson jumps get their own node at
/// the exact event time.
pub fn simulate_subordinator(model: &SubordinatorModel<f64>, horizon: f64, step: f64, rng: &mut RngStream) -> Result<PathRecord> {
    model.validate_time_change()?;
    let n = check_grid(horizon, step)?;
    let st = SubStepper::new(model);
    let d = model.drift();
    let mut times = vec![0.0];
    let mut values = vec![0.0];
    let mut left = vec![0.0];
    let mut v = 0.0;
    let mut t = 0.0;
    for i in 1..=n {
        let t_next = (i as f64 * step).min(horizon);
        match model.jumps() {
            SubJumps::CompoundPoissonExp { rate, mean } => {
                let mut s = t;
                loop {
                    s += rng.exp1() / rate;
                    if s >= t_next {
                        break;
                    }
                    let pre = v + d * (s - t);
                    v = pre + mean * rng.exp1();
                    t = s;
                    times.push(s);
                    left.push(pre);
                    values.push(v);
                }
                // Memorylessness: the overshooting gap is discarded.
                let pre = v + d * (t_next - t);
                v = pre;
                times.push(t_next);
                left.push(pre);
                values.push(v);
            }
            SubJumps::None => {
                v += d * (t_next - t);
                times.push(t_next);
                left.push(v);
                values.push(v);
            }
            _ => {
                let inc = st.step(t_next - t, rng);
                let pre = v + d * (t_next - t);
                v += inc;
                times.push(t_next);
                left.push(pre);
                values.push(v);
            }
        }
        t = t_next;
    }
    PathRecord::from_parts(times, values, left, PathKind::Sub)
}

/// Grid path of `X` (increments exact in law per step).
pub fn simulate_levy(model: &LevyModel<f64>, horizon: f64, step: f64, rng: &mut RngStream) -> Result<PathRecord> {
    let n = check_grid(horizon, step)?;
    let st = LevyStepper::new(model);
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    times.push(0.0);
    values.push(0.0);
    let mut x = 0.0;
    for i in 1..=n {
        let t = (i as f64 * step).min(horizon);
        x += st.step(t - times[i - 1], rng);
        times.push(t);
        values.push(x);
    }
    PathRecord::continuous(times, values, PathKind::Levy)
}

/// `ℓ_t = inf{s : Sub_s > t}` on the physical grid `0, dt, 2dt, ... < Sub_H`.
pub fn invert_path(sub: &PathRecord, dt: f64) -> Result<PathRecord> {
    if sub.kind != PathKind::Sub {
        return Err(Error::Domain("invert_path expects a subordinator path".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain("physical step must be positive".into()));
    }
    let top = sub.terminal_value();
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * dt;
        if t >= top {
            break;
        }
        times.push(t);
        values.push(sub.first_exceedance(t)?);
        k += 1;
    }
    if times.is_empty() {
        return Err(Error::Horizon { requested: 0.0, horizon: top });
    }
    PathRecord::continuous(times, values, PathKind::Inverse)
}

/// `ℓ_t` at a single physical time.
pub fn inverse_at(sub: &PathRecord, t: f64) -> Result<f64> {
    sub.first_exceedance(t)
}

/// `X_{ℓ_t}` on the physical grid covered by `ell`.
pub fn compose(levy: &PathRecord, ell: &PathRecord) -> Result<PathRecord> {
    let mut values = Vec::with_capacity(ell.len());
    for &s in &ell.values {
        if s > levy.terminal_time() {
            return Err(Error::Horizon { requested: s, horizon: levy.terminal_time() });
        }
        values.push(levy.value_at(s));
    }
    PathRecord::continuous(ell.times.clone(), values, PathKind::Subdiffusive)
}
