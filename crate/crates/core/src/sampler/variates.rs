//! Exact random variates: stable laws, tempered stable, Mittag-Leffler waiting times,
//! and increments of the model zoo.

use std::f64::consts::{FRAC_PI_2, PI};

use super::rng::RngStream;
use crate::error::{Error, Result};
use crate::models::{JumpDist, JumpSpec, LevyModel, Sign, SubJumps, SubordinatorModel};

/// `Sub_1` of the stable subordinator with `E[exp(-u Sub_1)] = exp(-u^α)` (Kanter's representation).
pub fn stable_subordinator_unit(alpha: f64, rng: &mut RngStream) -> f64 {
    let u = PI * rng.uniform();
    let e = rng.exp1();
    let a = ((alpha * u).sin().powf(alpha) * ((1.0 - alpha) * u).sin().powf(1.0 - alpha) / u.sin())
        .powf(1.0 / (1.0 - alpha));
    (a / e).powf((1.0 - alpha) / alpha)
}

/// `Sub_dt =(d) dt^{1/α} Sub_1`.
pub fn stable_subordinator_increment(alpha: f64, dt: f64, rng: &mut RngStream) -> f64 {
    dt.powf(1.0 / alpha) * stable_subordinator_unit(alpha, rng)
}

/// Increment over `dt` of the tempered stable subordinator `φ(u) = (u+θ)^α - θ^α`,
/// by rejection from the stable law with acceptance `exp(-θ S)`.
pub fn tempered_stable_increment(alpha: f64, theta: f64, dt: f64, rng: &mut RngStream) -> f64 {
    let pieces = (dt * theta.powf(alpha)).ceil().max(1.0) as usize;
    let h = dt / pieces as f64;
    let mut total = 0.0;
    for _ in 0..pieces {
        loop {
            let s = stable_subordinator_increment(alpha, h, rng);
            if rng.uniform() <= (-theta * s).exp() {
                total += s;
                break;
            }
        }
    }
    total
}

/// Mittag-Leffler waiting time: `P(J > t) = E_α(-λ t^α)`, drawn as `(E/λ)^{1/α} Sub_1`.
pub fn mittag_leffler_waiting_time(alpha: f64, lambda: f64, rng: &mut RngStream) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("waiting-time index must lie in (0,1), got {alpha}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("waiting-time rate must be positive, got {lambda}")));
    }
    let e = rng.exp1();
    Ok((e / lambda).powf(1.0 / alpha) * stable_subordinator_unit(alpha, rng))
}

/// Unit-time draw of the strictly stable law with `Ψ(z) = -|z|^a exp(iθ sgn z)`,
/// `θ = πa(1/2 - ρ)`. `orientation` flips the uniform angle so that
/// `(ρ, +1)` and `(1-ρ, -1)` give exact negatives from the same draws.
pub fn strictly_stable_unit(index: f64, rho: f64, orientation: f64, rng: &mut RngStream) -> f64 {
    let v = orientation * (PI * rng.uniform() - FRAC_PI_2);
    let w = rng.exp1();
    if index == 1.0 {
        // Cauchy with scale sin(πρ) shifted by -cos(πρ)
        return (PI * rho).sin() * v.tan() - (PI * rho).cos();
    }
    let theta = PI * index * (0.5 - rho);
    let num = (index * v - theta).sin();
    let den = v.cos().powf(1.0 / index);
    let tail = ((v - index * v + theta).cos() / w).powf((1.0 - index) / index);
    num / den * tail
}

/// Precomputed increment generator for a [`LevyModel`].
#[derive(Debug, Clone)]
pub struct LevyStepper {
    drift: f64,
    sigma: f64,
    orientation: f64,
    stable: Option<(f64, f64)>,
    comps: Vec<(f64, JumpDist<f64>)>,
    total_intensity: f64,
}

impl LevyStepper {
    pub fn new(model: &LevyModel<f64>) -> Self {
        let stable = match model.jumps() {
            JumpSpec::TwoSidedStable { index, rho } => Some((*index, *rho)),
            JumpSpec::SpectrallyNegativeStable { index } => Some((*index, 1.0 / *index)),
            _ => None,
        };
        let comps: Vec<(f64, JumpDist<f64>)> =
            model.finite_components().iter().map(|c| (c.intensity, c.dist)).collect();
        let total_intensity = comps.iter().map(|c| c.0).sum();
        Self {
            drift: model.drift(),
            sigma: model.sigma2().sqrt(),
            orientation: if model.is_mirrored() { -1.0 } else { 1.0 },
            stable,
            comps,
            total_intensity,
        }
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn total_intensity(&self) -> f64 {
        self.total_intensity
    }

    /// Finite activity and no Gaussian part: the path moves only by drift and jumps.
    pub fn is_pure_jump_finite(&self) -> bool {
        self.sigma == 0.0 && self.stable.is_none()
    }

    /// Increment `X_{t+dt} - X_t`.
    pub fn step(&self, dt: f64, rng: &mut RngStream) -> f64 {
        let mut dx = self.drift * dt;
        if self.sigma > 0.0 {
            dx += (self.orientation * self.sigma * dt.sqrt()) * rng.normal();
        }
        if let Some((index, rho)) = self.stable {
            let unit = strictly_stable_unit(index, rho, self.orientation, rng);
            dx += if index == 1.0 { dt * unit } else { dt.powf(1.0 / index) * unit };
        }
        for &(intensity, dist) in &self.comps {
            let n = rng.poisson(intensity * dt);
            if n > 0 {
                dx += match dist {
                    JumpDist::Exponential { rate, sign } => sign.factor::<f64>() * rng.gamma_int(n, 1.0 / rate),
                    JumpDist::Fixed { size } => n as f64 * size,
                };
            }
        }
        dx
    }

    /// One jump of the compound Poisson part, component chosen by intensity.
    pub fn jump(&self, rng: &mut RngStream) -> f64 {
        let mut u = rng.uniform() * self.total_intensity;
        let mut chosen = self.comps.last().map(|c| c.1);
        for &(intensity, dist) in &self.comps {
            if u < intensity {
                chosen = Some(dist);
                break;
            }
            u -= intensity;
        }
        let size = match chosen {
            Some(JumpDist::Exponential { rate, sign }) => sign.factor::<f64>() * rng.exp1() / rate,
            Some(JumpDist::Fixed { size }) => size,
            None => 0.0,
        };
        // Keep the draw count fixed whichever component is picked.
        if !matches!(chosen, Some(JumpDist::Exponential { .. })) {
            let _ = rng.uniform();
        }
        size
    }

    /// Whether some component can jump upwards (`sign` gives the path orientation).
    pub fn has_upward_jumps(&self, sign: f64) -> bool {
        self.comps.iter().any(|&(_, d)| match d {
            JumpDist::Exponential { sign: s, .. } => s.factor::<f64>() * sign > 0.0,
            JumpDist::Fixed { size } => size * sign > 0.0,
        })
    }
}

/// Precomputed increment generator for a [`SubordinatorModel`].
#[derive(Debug, Clone, Copy)]
pub struct SubStepper {
    drift: f64,
    jumps: SubJumps<f64>,
}

impl SubStepper {
    pub fn new(model: &SubordinatorModel<f64>) -> Self {
        Self { drift: model.drift(), jumps: model.jumps() }
    }

    pub fn is_zero(&self) -> bool {
        self.drift == 0.0 && self.jumps == SubJumps::None
    }

    pub fn is_pure_drift(&self) -> bool {
        self.jumps == SubJumps::None
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Increment over a duration `dt ≥ 0` (exact in law).
    pub fn step(&self, dt: f64, rng: &mut RngStream) -> f64 {
        if dt <= 0.0 {
            return 0.0;
        }
        self.drift * dt
            + match self.jumps {
                SubJumps::None => 0.0,
                SubJumps::Stable { alpha } => stable_subordinator_increment(alpha, dt, rng),
                SubJumps::TemperedStable { alpha, theta } => tempered_stable_increment(alpha, theta, dt, rng),
                SubJumps::CompoundPoissonExp { rate, mean } => {
                    let n = rng.poisson(rate * dt);
                    rng.gamma_int(n, mean)
                }
            }
    }
}

/// Convenience: the jump sign as a float.
pub fn sign_value(s: Sign) -> f64 {
    s.factor::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn stable_subordinator_laplace() {
        let mut rng = RngStream::new(11, 0);
        let xs: Vec<f64> = (0..200_000).map(|_| (-stable_subordinator_increment(0.5, 1.0, &mut rng)).exp()).collect();
        let (m, se) = mean_se(&xs);
        assert!((m - (-1f64).exp()).abs() < 4.0 * se, "{m} ± {se}");
    }

    #[test]
    fn stable_subordinator_negative_moment() {
        // E[Sub_1^{-1}] = Γ(1 + 1/α)/Γ(2) = 2 for α = 1/2
        let mut rng = RngStream::new(12, 0);
        let xs: Vec<f64> = (0..200_000).map(|_| 1.0 / stable_subordinator_unit(0.5, &mut rng)).collect();
        let (m, se) = mean_se(&xs);
        assert!((m - 2.0).abs() < 4.0 * se, "{m} ± {se}");
    }

    #[test]
    fn tempered_laplace() {
        let mut rng = RngStream::new(13, 0);
        let (a, th, dt) = (0.6, 2.0, 1.5);
        let xs: Vec<f64> = (0..100_000).map(|_| (-tempered_stable_increment(a, th, dt, &mut rng)).exp()).collect();
        let (m, se) = mean_se(&xs);
        let exact = (-dt * ((1.0f64 + th).powf(a) - th.powf(a))).exp();
        assert!((m - exact).abs() < 4.0 * se, "{m} vs {exact}");
    }

    #[test]
    fn two_sided_stable_characteristic_function() {
        for &(index, rho) in &[(1.5, 0.5), (1.6, 1.0 / 1.6), (0.7, 0.3), (1.0, 0.4), (1.3, 0.6)] {
            let mut rng = RngStream::new(14, 0);
            let n = 200_000;
            let z = 0.8f64;
            let (mut c, mut s) = (0.0, 0.0);
            for _ in 0..n {
                let x = strictly_stable_unit(index, rho, 1.0, &mut rng);
                c += (z * x).cos();
                s += (z * x).sin();
            }
            let th = PI * index * (0.5 - rho);
            let mag = (-z.powf(index) * th.cos()).exp();
            let (ec, es) = (mag * (z.powf(index) * th.sin()).cos(), -mag * (z.powf(index) * th.sin()).sin());
            let tol = 4.0 / (n as f64).sqrt();
            assert!((c / n as f64 - ec).abs() < tol && (s / n as f64 - es).abs() < tol, "a={index} rho={rho}");
        }
    }

    #[test]
    fn orientation_negates_exactly() {
        let mut r1 = RngStream::new(3, 9);
        let mut r2 = RngStream::new(3, 9);
        for _ in 0..1000 {
            let a = strictly_stable_unit(1.4, 0.6, 1.0, &mut r1);
            let b = strictly_stable_unit(1.4, 0.4, -1.0, &mut r2);
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn ml_waiting_time_survival() {
        let mut rng = RngStream::new(15, 0);
        let n = 200_000;
        let hits = (0..n).filter(|_| mittag_leffler_waiting_time(0.5, 1.0, &mut rng).unwrap() > 1.0).count();
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((p - 0.427_583_576_155_807).abs() < 4.0 * se);
        assert!(mittag_leffler_waiting_time(1.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn compound_poisson_subordinator_mean() {
        let sub = SubordinatorModel::new(1.0, SubJumps::CompoundPoissonExp { rate: 2.0, mean: 1.0 }).unwrap();
        let st = SubStepper::new(&sub);
        let mut rng = RngStream::new(16, 0);
        let xs: Vec<f64> = (0..50_000).map(|_| st.step(10.0, &mut rng)).collect();
        let (m, se) = mean_se(&xs);
        assert!((m - 30.0).abs() < 4.0 * se);
    }
}
