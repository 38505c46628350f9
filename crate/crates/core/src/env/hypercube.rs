use nalgebra::DVector;
use rand::{Rng, RngCore};

use super::Environment;
use crate::error::{invalid, Result};

/// Largest dimension for which all `2^p` corners are offered as actions.
pub const MAX_CORNER_DIM: usize = 10;

/// Worst-case instance on `[−1, 1]^p` with `γ ∈ {±1/√T}^p` and unit Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct HypercubeInstance {
    gamma: DVector<f64>,
    horizon: usize,
    actions: Vec<DVector<f64>>,
}

impl HypercubeInstance {
    pub fn sample<R: Rng + ?Sized>(p: usize, horizon: usize, rng: &mut R) -> Result<Self> {
        if p < 1 || horizon < 1 {
            return invalid("hypercube instance needs p >= 1 and T >= 1");
        }
        let mag = 1.0 / (horizon as f64).sqrt();
        let gamma = DVector::from_fn(p, |_, _| if rng.random::<bool>() { mag } else { -mag });
        Ok(Self::with_gamma(gamma, horizon))
    }

    pub fn with_gamma(gamma: DVector<f64>, horizon: usize) -> Self {
        let p = gamma.len();
        let actions = if p <= MAX_CORNER_DIM {
            (0..1usize << p)
                .map(|bits| DVector::from_fn(p, |i, _| if bits >> i & 1 == 1 { 1.0 } else { -1.0 }))
                .collect()
        } else {
            (0..2 * p)
                .map(|k| {
                    let mut v = DVector::zeros(p);
                    v[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                    v
                })
                .collect()
        };
        Self {
            gamma,
            horizon,
            actions,
        }
    }

    pub fn gamma(&self) -> &DVector<f64> {
        &self.gamma
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn actions(&self) -> &[DVector<f64>] {
        &self.actions
    }

    /// Best per-round mean reward.
    pub fn optimal_reward(&self) -> f64 {
        self.actions.iter().map(|a| a.dot(&self.gamma)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max ‖φ‖₂` over the action set.
    pub fn feature_bound(&self) -> f64 {
        self.actions.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

impl Environment for HypercubeInstance {
    fn dim(&self) -> usize {
        self.gamma.len()
    }

    fn candidates(&self, t: usize, _rng: &mut dyn RngCore) -> Result<Vec<DVector<f64>>> {
        if t < 1 || t > self.horizon {
            return invalid(format!("round {t} outside 1..={}", self.horizon));
        }
        Ok(self.actions.clone())
    }

    fn mean_reward(&self, _t: usize, feature: &DVector<f64>) -> Result<f64> {
        if feature.len() != self.gamma.len() {
            return invalid("feature dimension mismatch");
        }
        Ok(feature.dot(&self.gamma))
    }

    fn noise_sigma(&self) -> f64 {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_dimensional_gamma() {
        for seed in 0..10 {
            let h = HypercubeInstance::sample(1, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert!(h.gamma()[0] == 0.5 || h.gamma()[0] == -0.5);
            assert_eq!(h.actions().len(), 2);
        }
    }

    #[test]
    fn optimum_is_sign_matching() {
        let h = HypercubeInstance::sample(6, 100, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(h.actions().len(), 64);
        assert!((h.optimal_reward() - 0.6).abs() < 1e-12);
        assert!(h.gamma().iter().all(|g| (g.abs() - 0.1).abs() < 1e-15));
    }

    #[test]
    fn large_dimension_uses_axis_actions() {
        let h = HypercubeInstance::sample(12, 9, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        assert_eq!(h.actions().len(), 24);
        assert!((h.optimal_reward() - 1.0 / 3.0).abs() < 1e-12);
    }
}
