//! Bandit policies behind a common select/update interface.

mod discounted;
mod isd;
mod linucb;
pub mod radius;
mod ridge;
mod simple;
mod window;

pub use discounted::DiscountedLinUcb;
pub use isd::{IsdParams, IsdPolicy, OracleTier, Truth};
pub use linucb::{LinUcb, UcbParams};
pub use radius::RadiusMode;
pub use ridge::RidgeState;
pub use simple::{GreedyOracle, UniformRandom};
pub use window::SlidingWindowLinUcb;

use nalgebra::DVector;

use crate::error::{invalid, Result};

pub trait Policy: Send {
    /// Index of the chosen candidate.
    fn select_action(&mut self, candidates: &[DVector<f64>]) -> Result<usize>;

    fn update(&mut self, feature: &DVector<f64>, reward: f64) -> Result<()>;

    fn as_isd(&self) -> Option<&IsdPolicy> {
        None
    }
}

/// Index of the largest score, lowest index on ties.
pub fn argmax(scores: &[f64]) -> Result<usize> {
    if scores.is_empty() {
        return invalid("empty candidate set");
    }
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            return Err(crate::Error::Numerical(format!("score of candidate {i} is NaN")));
        }
        if s > scores[best] {
            best = i;
        }
    }
    Ok(best)
}

pub(crate) fn check_update(feature: &DVector<f64>, reward: f64, p: usize) -> Result<()> {
    if feature.len() != p {
        return invalid(format!("feature has dimension {}, expected {p}", feature.len()));
    }
    if !reward.is_finite() || !crate::linalg::is_finite_vec(feature) {
        return invalid("non-finite reward or feature");
    }
    Ok(())
}

pub(crate) fn check_candidates(candidates: &[DVector<f64>], p: usize) -> Result<()> {
    if candidates.is_empty() {
        return invalid("empty candidate set");
    }
    if candidates.iter().any(|c| c.len() != p) {
        return invalid(format!("candidate dimension differs from {p}"));
    }
    Ok(())
}
