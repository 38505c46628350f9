use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use super::linucb::UcbParams;
use super::ridge::RidgeState;
use super::{argmax, check_candidates, check_update, Policy};
use crate::error::{invalid, Result};

/// LinUCB on the most recent `w` observations; the Gram matrix is rebuilt
/// from the buffer after every update.
#[derive(Debug, Clone)]
pub struct SlidingWindowLinUcb {
    params: UcbParams,
    window: usize,
    buffer: VecDeque<(DVector<f64>, f64)>,
    ridge: RidgeState,
    t: usize,
}

impl SlidingWindowLinUcb {
    pub fn new(p: usize, window: usize, params: UcbParams) -> Result<Self> {
        if window == 0 {
            return invalid("window length must be >= 1");
        }
        Ok(Self {
            params,
            window,
            buffer: VecDeque::with_capacity(window),
            ridge: RidgeState::new(p, params.lambda)?,
            t: 1,
        })
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer.len()
    }

    pub fn ridge(&self) -> &RidgeState {
        &self.ridge
    }
}

impl Policy for SlidingWindowLinUcb {
    fn select_action(&mut self, candidates: &[DVector<f64>]) -> Result<usize> {
        check_candidates(candidates, self.ridge.dim())?;
        let rho = self.params.radius(self.t.min(self.window), self.ridge.dim())?;
        let scores: Vec<f64> = candidates
            .iter()
            .map(|x| self.ridge.theta().dot(x) + rho * self.ridge.width(x))
            .collect();
        argmax(&scores)
    }

    fn update(&mut self, feature: &DVector<f64>, reward: f64) -> Result<()> {
        let p = self.ridge.dim();
        check_update(feature, reward, p)?;
        if self.buffer.len() == self.window {
            self.buffer.pop_front();
        }
        self.buffer.push_back((feature.clone(), reward));
        let mut gram = DMatrix::identity(p, p) * self.params.lambda;
        let mut moment = DVector::zeros(p);
        for (x, y) in &self.buffer {
            gram.ger(1.0, x, x, 1.0);
            moment.axpy(*y, x, 1.0);
        }
        self.ridge = RidgeState::from_parts(gram, moment)?;
        self.t += 1;
        Ok(())
    }
}
