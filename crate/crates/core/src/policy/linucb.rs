use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::radius::{rho_res, ResidualRadiusInputs};
use super::ridge::RidgeState;
use super::{argmax, check_candidates, check_update, Policy};
use crate::error::Result;

/// Constants shared by the UCB policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcbParams {
    pub lambda: f64,
    pub eta: f64,
    pub sigma: f64,
    /// Feature norm bound `L`.
    pub l: f64,
    /// Parameter norm bound `M`.
    pub m: f64,
}

impl UcbParams {
    pub(crate) fn radius(&self, t: usize, dim: usize) -> Result<f64> {
        rho_res(&ResidualRadiusInputs {
            t,
            eta: self.eta,
            l: self.l,
            m: self.m,
            sigma: self.sigma,
            lambda: self.lambda,
            p_res: dim,
            delta_pi: 0.0,
            beta_err: 0.0,
        })
    }
}

/// Stationary LinUCB over the full feature space.
#[derive(Debug, Clone)]
pub struct LinUcb {
    params: UcbParams,
    ridge: RidgeState,
    t: usize,
}

impl LinUcb {
    pub fn new(p: usize, params: UcbParams) -> Result<Self> {
        Ok(Self {
            params,
            ridge: RidgeState::new(p, params.lambda)?,
            t: 1,
        })
    }

    pub fn ridge(&self) -> &RidgeState {
        &self.ridge
    }

    /// Current round (number of updates plus one).
    pub fn round(&self) -> usize {
        self.t
    }

    pub fn radius(&self) -> Result<f64> {
        self.params.radius(self.t, self.ridge.dim())
    }

    pub fn scores(&self, candidates: &[DVector<f64>]) -> Result<Vec<f64>> {
        check_candidates(candidates, self.ridge.dim())?;
        let rho = self.radius()?;
        Ok(candidates
            .iter()
            .map(|x| self.ridge.theta().dot(x) + rho * self.ridge.width(x))
            .collect())
    }
}

impl Policy for LinUcb {
    fn select_action(&mut self, candidates: &[DVector<f64>]) -> Result<usize> {
        argmax(&self.scores(candidates)?)
    }

    fn update(&mut self, feature: &DVector<f64>, reward: f64) -> Result<()> {
        check_update(feature, reward, self.ridge.dim())?;
        self.ridge.update(feature, reward)?;
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> UcbParams {
        UcbParams {
            lambda: 0.1,
            eta: 0.01,
            sigma: 0.0,
            l: 1.0,
            m: 0.0,
        }
    }

    #[test]
    fn zero_radius_exploits() {
        let mut p = LinUcb::new(2, params()).unwrap();
        p.update(&DVector::from_vec(vec![1.0, 0.0]), 1.0).unwrap();
        p.update(&DVector::from_vec(vec![0.0, 1.0]), 0.3).unwrap();
        let cands = vec![DVector::from_vec(vec![0.0, 1.0]), DVector::from_vec(vec![1.0, 0.0])];
        assert_eq!(p.select_action(&cands).unwrap(), 1);
        let same = vec![cands[0].clone(), cands[0].clone()];
        assert_eq!(p.select_action(&same).unwrap(), 0);
        assert!(p.select_action(&[]).is_err());
    }

    #[test]
    fn non_finite_reward_rejected() {
        let mut p = LinUcb::new(2, params()).unwrap();
        assert!(p.update(&DVector::from_vec(vec![1.0, 0.0]), f64::NAN).is_err());
        assert!(p.update(&DVector::from_vec(vec![1.0]), 1.0).is_err());
    }
}
