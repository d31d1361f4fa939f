//! Special-function kernels and numerical transform inversion.

pub mod barnes;
pub mod bessel;
pub mod gamma;
pub mod laplace;
pub mod mellin;
pub mod mittag_leffler;
pub mod quadrature;
pub mod roots;

pub use barnes::log_barnes_g;
pub use bessel::bessel_k;
pub use gamma::{gamma, gamma_complex, ln_gamma, log_gamma, log_gamma_ratio, polygamma};
pub use laplace::laplace_invert;
pub use mellin::{mellin_barnes_integrate, DecayEnvelope, LineIntegral, MellinLine};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_asymptotic};

/// A computed value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyReport<V> {
    pub value: V,
    pub abs_error: f64,
}

impl<V> AccuracyReport<V> {
    pub fn new(value: V, abs_error: f64) -> Self {
        Self { value, abs_error: abs_error.abs() }
    }

    pub fn exact(value: V) -> Self {
        Self { value, abs_error: 0.0 }
    }

    pub fn map<W>(self, f: impl FnOnce(V) -> W) -> AccuracyReport<W> {
        AccuracyReport { value: f(self.value), abs_error: self.abs_error }
    }
}
