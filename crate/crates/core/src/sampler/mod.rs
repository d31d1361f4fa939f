//! Path simulation and first-passage sampling (`f64` only).

pub mod fpt;
pub mod path;
pub mod rng;
pub mod variates;

pub use fpt::{
    exit_two_barrier, fpt_direct, fpt_dual, fpt_reduced, fpt_reduced_halving, write_samples_csv, ExitSample, FptSample,
    Method, SamplerConfig,
};
pub use path::{compose, invert_path, simulate_levy, simulate_subordinator, PathKind, PathRecord};
pub use rng::RngStream;
