use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{argmax, check_candidates, Policy};
use crate::error::Result;

/// Chooses uniformly at random among the candidates.
#[derive(Debug, Clone)]
pub struct UniformRandom {
    rng: ChaCha8Rng,
}

impl UniformRandom {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for UniformRandom {
    fn select_action(&mut self, candidates: &[DVector<f64>]) -> Result<usize> {
        if candidates.is_empty() {
            return crate::error::invalid("empty candidate set");
        }
        Ok(self.rng.random_range(0..candidates.len()))
    }

    fn update(&mut self, _feature: &DVector<f64>, _reward: f64) -> Result<()> {
        Ok(())
    }
}

/// Greedy policy that knows the online parameter exactly.
#[derive(Debug, Clone)]
pub struct GreedyOracle {
    gamma: DVector<f64>,
}

impl GreedyOracle {
    pub fn new(gamma: DVector<f64>) -> Self {
        Self { gamma }
    }
}

impl Policy for GreedyOracle {
    fn select_action(&mut self, candidates: &[DVector<f64>]) -> Result<usize> {
        check_candidates(candidates, self.gamma.len())?;
        let scores: Vec<f64> = candidates.iter().map(|x| x.dot(&self.gamma)).collect();
        argmax(&scores)
    }

    fn update(&mut self, _feature: &DVector<f64>, _reward: f64) -> Result<()> {
        Ok(())
    }
}
