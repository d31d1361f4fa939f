//! Seeded, stream-addressable random number source.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// ChaCha8 generator addressed by `(seed, stream_id)`.
///
/// Distinct stream ids give independent sequences; the same pair always
/// reproduces the same output bit for bit.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        loop {
            let u: f64 = self.inner.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Unit-mean exponential.
    #[inline]
    pub fn exp1(&mut self) -> f64 {
        -self.uniform().ln()
    }

    /// Standard normal.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Poisson count with the given mean.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        if mean < 30.0 {
            // inversion by products of uniforms
            let limit = (-mean).exp();
            let mut k = 0u64;
            let mut p = self.uniform();
            while p > limit {
                k += 1;
                p *= self.uniform();
            }
            k
        } else {
            rand_distr::Poisson::new(mean).map(|d| d.sample(&mut self.inner) as u64).unwrap_or(0)
        }
    }

    /// Gamma(shape, scale) with integer shape `k ≥ 1` (sum of exponentials for small `k`).
    pub fn gamma_int(&mut self, k: u64, scale: f64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        if k <= 16 {
            (0..k).map(|_| self.exp1()).sum::<f64>() * scale
        } else {
            rand_distr::Gamma::new(k as f64, scale).map(|d| d.sample(&mut self.inner)).unwrap_or(0.0)
        }
    }

    /// Inverse Gaussian with the given mean and shape.
    pub fn inverse_gaussian(&mut self, mean: f64, shape: f64) -> f64 {
        rand_distr::InverseGaussian::new(mean, shape).map(|d| d.sample(&mut self.inner)).unwrap_or(f64::NAN)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
