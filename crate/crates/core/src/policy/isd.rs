use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linucb::UcbParams;
use super::radius::{
    beta_err_bound, delta_pi_surrogate, rho_inv, rho_res, self_normalized, InvariantRadiusInputs, RadiusMode,
    ResidualRadiusInputs,
};
use super::ridge::RidgeState;
use super::{argmax, check_candidates, check_update, Policy};
use crate::env::OfflineLog;
use crate::error::{invalid, Result};
use crate::linalg::{inverse_norm, min_eigenvalue, solve_cholesky};
use crate::subspace::{estimate_decomposition, DecompositionEstimate, DecompositionOptions, IsdBasis};

/// Which ground-truth quantities the policy is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleTier {
    /// Subspaces and invariant component are estimated from the offline log.
    None,
    Subspaces,
    SubspacesAndBeta,
}

/// Ground truth handed to oracle tiers.
#[derive(Debug, Clone)]
pub struct Truth {
    pub basis: IsdBasis,
    /// `β^inv` in ambient coordinates.
    pub beta_inv: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsdParams {
    pub ucb: UcbParams,
    pub tier: OracleTier,
    pub radius_mode: RadiusMode,
    /// Constant `c` of the subspace-error surrogate.
    pub delta_pi_c: f64,
    pub decomposition: DecompositionOptions,
    /// Refit on the offline log plus all online rounds before every round.
    pub recompute: bool,
    /// Keep the first estimated basis when refitting.
    pub freeze_basis: bool,
}

/// ISD-linUCB: invariant component fitted offline, UCB exploration restricted
/// to the residual subspace.
#[derive(Debug, Clone)]
pub struct IsdPolicy {
    params: IsdParams,
    truth: Option<Truth>,
    jbd_seed: u64,
    basis: IsdBasis,
    estimate: Option<DecompositionEstimate>,
    pool_features: Vec<DVector<f64>>,
    pool_rewards: Vec<f64>,
    n_offline: usize,
    beta_coords: DVector<f64>,
    beta_hat: DVector<f64>,
    inv_gram: DMatrix<f64>,
    inv_chol: Option<Cholesky<f64, Dyn>>,
    lambda0_hat: f64,
    sigma_inv_hat: f64,
    rho_inv: f64,
    beta_err: f64,
    delta_pi: f64,
    residual: RidgeState,
    t: usize,
}

impl IsdPolicy {
    /// Fit the offline part of the policy. Oracle tiers require `truth`.
    pub fn fit_offline(log: &OfflineLog, params: IsdParams, truth: Option<Truth>, jbd_seed: u64) -> Result<Self> {
        if params.tier != OracleTier::None && truth.is_none() {
            return invalid("oracle tiers need the ground-truth decomposition");
        }
        if let Some(tr) = &truth {
            if tr.basis.p() != log.dim() || tr.beta_inv.len() != log.dim() {
                return invalid("ground truth dimension differs from the log");
            }
        }
        let p = log.dim();
        let basis = match &truth {
            Some(tr) => tr.basis.clone(),
            None => IsdBasis::all_residual(p),
        };
        let mut policy = Self {
            params,
            truth,
            jbd_seed,
            residual: RidgeState::new(basis.p_res(), params.ucb.lambda)?,
            basis,
            estimate: None,
            pool_features: log.features(),
            pool_rewards: log.rewards(),
            n_offline: log.len(),
            beta_coords: DVector::zeros(0),
            beta_hat: DVector::zeros(p),
            inv_gram: DMatrix::zeros(0, 0),
            inv_chol: None,
            lambda0_hat: 0.0,
            sigma_inv_hat: 0.0,
            rho_inv: 0.0,
            beta_err: 0.0,
            delta_pi: 0.0,
            t: 1,
        };
        policy.refit()?;
        Ok(policy)
    }

    fn refit(&mut self) -> Result<()> {
        let n = self.pool_features.len();
        let p = self.beta_hat.len();
        let tier = self.params.tier;
        if tier == OracleTier::None && (self.estimate.is_none() || !self.params.freeze_basis) {
            let mut rng = ChaCha8Rng::seed_from_u64(self.jbd_seed);
            let est = estimate_decomposition(&self.pool_features, &self.pool_rewards, &self.params.decomposition, &mut rng)?;
            self.basis = est.basis.clone();
            self.estimate = Some(est);
        }

        let mut full = DMatrix::zeros(p, p);
        for x in &self.pool_features {
            full.ger(1.0, x, x, 1.0);
        }
        self.lambda0_hat = (min_eigenvalue(&full) / n as f64).max(0.0);

        let u_inv = self.basis.u_inv();
        let p_inv = self.basis.p_inv();
        self.inv_gram = u_inv.transpose() * &full * u_inv;
        self.sigma_inv_hat = 0.0;
        if tier == OracleTier::SubspacesAndBeta {
            let truth = self.truth.as_ref().expect("checked at construction");
            self.beta_coords = u_inv.transpose() * &truth.beta_inv;
            self.inv_chol = None;
        } else if p_inv == 0 {
            self.beta_coords = DVector::zeros(0);
            self.inv_chol = None;
        } else {
            let chol = solve_cholesky(&self.inv_gram)?;
            let mut moment = DVector::zeros(p_inv);
            for (x, &r) in self.pool_features.iter().zip(&self.pool_rewards) {
                moment.axpy(r, &(u_inv.transpose() * x), 1.0);
            }
            self.beta_coords = chol.solve(&moment);
            self.inv_chol = Some(chol);
            if n > p_inv {
                let beta = u_inv * &self.beta_coords;
                let rss: f64 = self
                    .pool_features
                    .iter()
                    .zip(&self.pool_rewards)
                    .map(|(x, r)| (r - x.dot(&beta)).powi(2))
                    .sum();
                self.sigma_inv_hat = (rss / (n - p_inv) as f64).sqrt();
            }
        }
        self.beta_hat = u_inv * &self.beta_coords;
        self.set_radii(n)?;
        self.rebuild_residual()
    }

    fn set_radii(&mut self, n: usize) -> Result<()> {
        let c = self.params.ucb;
        let p_inv = self.basis.p_inv();
        let tier = self.params.tier;
        self.delta_pi = 0.0;
        self.beta_err = 0.0;
        self.rho_inv = 0.0;
        if tier == OracleTier::SubspacesAndBeta || p_inv == 0 {
            return Ok(());
        }
        match self.params.radius_mode {
            RadiusMode::Theory => {
                if tier == OracleTier::None {
                    self.delta_pi = delta_pi_surrogate(self.params.delta_pi_c, self.basis.p(), c.eta, n)?;
                }
                self.rho_inv = rho_inv(&InvariantRadiusInputs {
                    t0: n,
                    eta: c.eta,
                    l: c.l,
                    m: c.m,
                    sigma: c.sigma,
                    lambda0: self.lambda0_hat,
                    p_inv,
                    delta_pi: self.delta_pi,
                    oracle_subspaces: tier == OracleTier::Subspaces,
                })?;
                self.beta_err = beta_err_bound(self.rho_inv, self.lambda0_hat, n)?;
            }
            RadiusMode::PlugIn => {
                if !(self.lambda0_hat > 0.0) {
                    return invalid("offline log is rank-deficient");
                }
                let arg = c.l * c.l / (p_inv as f64 * self.lambda0_hat);
                self.rho_inv = self_normalized(self.sigma_inv_hat, c.eta, p_inv, arg);
            }
        }
        Ok(())
    }

    fn rebuild_residual(&mut self) -> Result<()> {
        let u_res = self.basis.u_res();
        let mut ridge = RidgeState::new(self.basis.p_res(), self.params.ucb.lambda)?;
        for (x, &r) in self.pool_features[self.n_offline..].iter().zip(&self.pool_rewards[self.n_offline..]) {
            ridge.update(&(u_res.transpose() * x), r - x.dot(&self.beta_hat))?;
        }
        self.residual = ridge;
        Ok(())
    }

    /// Refit on the offline log plus every online round seen so far, if enabled.
    pub fn maybe_recompute(&mut self) -> Result<()> {
        if self.params.recompute {
            self.refit()?;
        }
        Ok(())
    }

    /// Residual radius for the current round.
    pub fn rho_res(&self) -> Result<f64> {
        let c = self.params.ucb;
        rho_res(&ResidualRadiusInputs {
            t: self.t,
            eta: c.eta,
            l: c.l,
            m: c.m,
            sigma: c.sigma,
            lambda: c.lambda,
            p_res: self.basis.p_res(),
            delta_pi: self.delta_pi,
            beta_err: self.beta_err,
        })
    }

    pub fn scores(&self, candidates: &[DVector<f64>]) -> Result<Vec<f64>> {
        check_candidates(candidates, self.beta_hat.len())?;
        let rho_res = self.rho_res()?;
        let (u_inv, u_res) = (self.basis.u_inv(), self.basis.u_res());
        let delta = self.residual.theta();
        Ok(candidates
            .iter()
            .map(|x| {
                let inv_bonus = match &self.inv_chol {
                    Some(ch) => self.rho_inv * inverse_norm(ch, &(u_inv.transpose() * x)),
                    None => 0.0,
                };
                let z = u_res.transpose() * x;
                x.dot(&self.beta_hat) + inv_bonus + z.dot(delta) + rho_res * self.residual.width(&z)
            })
            .collect())
    }

    /// `‖β̂ − Π̂β‖` in the offline invariant Gram norm.
    pub fn invariant_error_norm(&self, beta_inv: &DVector<f64>) -> f64 {
        let d = &self.beta_coords - self.basis.u_inv().transpose() * beta_inv;
        d.dot(&(&self.inv_gram * &d)).max(0.0).sqrt()
    }

    /// `‖δ̂ − Π̂δ‖` in the current residual Gram norm, for online parameter `gamma`.
    pub fn residual_error_norm(&self, gamma: &DVector<f64>) -> f64 {
        let target = self.basis.u_res().transpose() * gamma;
        let d = self.residual.theta() - target;
        d.dot(&(self.residual.gram() * &d)).max(0.0).sqrt()
    }

    pub fn basis(&self) -> &IsdBasis {
        &self.basis
    }

    pub fn estimate(&self) -> Option<&DecompositionEstimate> {
        self.estimate.as_ref()
    }

    pub fn params(&self) -> &IsdParams {
        &self.params
    }

    /// `β̂^inv` in ambient coordinates.
    pub fn beta_hat(&self) -> &DVector<f64> {
        &self.beta_hat
    }

    pub fn beta_coords(&self) -> &DVector<f64> {
        &self.beta_coords
    }

    pub fn residual(&self) -> &RidgeState {
        &self.residual
    }

    pub fn rho_inv(&self) -> f64 {
        self.rho_inv
    }

    /// 2-norm error bound on `β̂^inv` entering the residual radius.
    pub fn beta_err(&self) -> f64 {
        self.beta_err
    }

    /// Subspace error plugged into the radii.
    pub fn delta_pi(&self) -> f64 {
        self.delta_pi
    }

    pub fn lambda0_hat(&self) -> f64 {
        self.lambda0_hat
    }

    pub fn sigma_inv_hat(&self) -> f64 {
        self.sigma_inv_hat
    }

    pub fn round(&self) -> usize {
        self.t
    }
}

impl Policy for IsdPolicy {
    fn select_action(&mut self, candidates: &[DVector<f64>]) -> Result<usize> {
        argmax(&self.scores(candidates)?)
    }

    fn update(&mut self, feature: &DVector<f64>, reward: f64) -> Result<()> {
        check_update(feature, reward, self.beta_hat.len())?;
        let z = self.basis.u_res().transpose() * feature;
        self.residual.update(&z, reward - feature.dot(&self.beta_hat))?;
        self.pool_features.push(feature.clone());
        self.pool_rewards.push(reward);
        self.t += 1;
        self.maybe_recompute()
    }

    fn as_isd(&self) -> Option<&IsdPolicy> {
        Some(self)
    }
}
