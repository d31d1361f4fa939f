//! First-passage problems for subordinated Lévy processes.

pub mod cox_renewal;
pub mod error;
pub mod fractional;
pub mod models;
pub mod montecarlo;
pub mod sampler;
pub mod scalar;
pub mod selftest;
pub mod special;
pub mod spectrally_negative;
pub mod wiener_hopf;

pub use error::{Error, Result};

pub type LevyModel64 = models::LevyModel<f64>;
pub type SubordinatorModel64 = models::SubordinatorModel<f64>;
pub type ProblemTriple64 = models::ProblemTriple<f64>;
pub type CompositeExponent64 = models::CompositeExponent<f64>;
