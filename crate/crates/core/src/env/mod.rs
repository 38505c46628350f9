//! Generative bandit environments and offline logs.

mod hypercube;
mod log;
mod synthetic;

pub use hypercube::{HypercubeInstance, MAX_CORNER_DIM};
pub use log::{generate_offline_log, OfflineLog, OfflineRecord, RANK_TOL};
pub use synthetic::{
    offline_drift, random_orthonormal, residual_scale, InstanceConfig, Round, SyntheticInstance, DEFAULT_NOISE_SIGMA,
};

use nalgebra::DVector;
use rand::RngCore;

use crate::error::Result;

/// An online environment as seen by the episode runner: candidate features at
/// round `t ∈ 1..=T` and their noiseless mean rewards.
pub trait Environment {
    fn dim(&self) -> usize;

    fn candidates(&self, t: usize, rng: &mut dyn RngCore) -> Result<Vec<DVector<f64>>>;

    fn mean_reward(&self, t: usize, feature: &DVector<f64>) -> Result<f64>;

    fn noise_sigma(&self) -> f64;
}
