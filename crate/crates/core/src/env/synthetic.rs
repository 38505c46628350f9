//! Time-varying linear reward model with a planted invariant subspace decomposition.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Environment;
use crate::error::{invalid, Error, Result};
use crate::subspace::IsdBasis;

/// Parameters of a synthetic instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub p: usize,
    pub p_res: usize,
    #[serde(default = "default_actions")]
    pub n_actions: usize,
    pub t0: usize,
    pub horizon: usize,
    #[serde(default = "default_sigma")]
    pub noise_sigma: f64,
}

fn default_actions() -> usize {
    5
}

fn default_sigma() -> f64 {
    DEFAULT_NOISE_SIGMA
}

/// Noise level used when a configuration does not set one.
pub const DEFAULT_NOISE_SIGMA: f64 = 0.1;

impl InstanceConfig {
    pub fn p_inv(&self) -> usize {
        self.p - self.p_res
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_res < 1 || self.p_res >= self.p {
            return invalid(format!("need 1 <= p_res < p, got p = {}, p_res = {}", self.p, self.p_res));
        }
        if self.n_actions < 2 {
            return invalid(format!("need at least 2 actions, got {}", self.n_actions));
        }
        if self.t0 < 1 || self.horizon < 1 {
            return invalid("t0 and horizon must be >= 1");
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return invalid(format!("noise_sigma must be finite and >= 0, got {}", self.noise_sigma));
        }
        Ok(())
    }
}

/// A round in the offline window (`1..=T₀`, position in the log) or online (`1..=T`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Offline(usize),
    Online(usize),
}

impl Round {
    /// Signed index: offline position `τ` maps to `τ − T₀ − 1 ∈ [−T₀, −1]`.
    pub fn signed(self, t0: usize) -> i64 {
        match self {
            Round::Offline(tau) => tau as i64 - t0 as i64 - 1,
            Round::Online(t) => t as i64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    config: InstanceConfig,
    u: DMatrix<f64>,
    basis: IsdBasis,
    beta_inv_coords: DVector<f64>,
    delta_res_offline: DMatrix<f64>,
    delta_res_online: DVector<f64>,
    inv_spectrum: DVector<f64>,
    res_spectrum: DVector<f64>,
    beta_inv: DVector<f64>,
    gamma_online: DVector<f64>,
    param_bound: f64,
    feature_bound: Option<f64>,
}

/// Haar-distributed orthonormal matrix via QR of a standard Gaussian matrix.
pub fn random_orthonormal<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn uniform_vec<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(0.5..1.5))
}

/// Offline drift added to residual coordinate `i` (1-based) at log position `tau`.
pub fn offline_drift(i: usize, tau: usize, t0: usize) -> f64 {
    let frac = tau as f64 / t0 as f64;
    let s = (0.25 * i as f64 * frac + i as f64).sin();
    -1.5 * frac * s * s
}

/// Residual-block variance multiplier at an offline log position (one full
/// period over the offline window); online rounds use 1.
pub fn residual_scale(round: Round, t0: usize) -> f64 {
    match round {
        Round::Offline(tau) => 1.0 + 0.5 * (2.0 * PI * tau as f64 / t0 as f64).sin(),
        Round::Online(_) => 1.0,
    }
}

impl SyntheticInstance {
    pub fn sample<R: Rng + ?Sized>(config: InstanceConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let (p, p_res, t0) = (config.p, config.p_res, config.t0);
        let p_inv = p - p_res;
        let u = random_orthonormal(p, rng);
        let inv_cols: Vec<usize> = (0..p_inv).collect();
        let res_cols: Vec<usize> = (p_inv..p).collect();
        let basis = IsdBasis::from_columns(&u, &inv_cols, &res_cols)?;

        let beta_inv_coords = uniform_vec(p_inv, rng);
        let initial = uniform_vec(p_res, rng);
        let delta_res_offline = DMatrix::from_fn(t0, p_res, |row, i| initial[i] + offline_drift(i + 1, row + 1, t0));
        let delta_res_online = uniform_vec(p_res, rng);
        let inv_spectrum = uniform_vec(p_inv, rng);
        let res_spectrum = uniform_vec(p_res, rng);

        let beta_inv = basis.u_inv() * &beta_inv_coords;
        let gamma_online = &beta_inv + basis.u_res() * &delta_res_online;
        let beta_sq = beta_inv_coords.norm_squared();
        let mut max_sq = beta_sq + delta_res_online.norm_squared();
        for row in delta_res_offline.row_iter() {
            max_sq = max_sq.max(beta_sq + row.norm_squared());
        }

        Ok(Self {
            config,
            u,
            basis,
            beta_inv_coords,
            delta_res_offline,
            delta_res_online,
            inv_spectrum,
            res_spectrum,
            beta_inv,
            gamma_online,
            param_bound: max_sq.sqrt(),
            feature_bound: None,
        })
    }

    pub fn config(&self) -> &InstanceConfig {
        &self.config
    }

    pub fn basis(&self) -> &IsdBasis {
        &self.basis
    }

    /// The full orthonormal matrix `U = [U^inv, U^res]`.
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn beta_inv_coords(&self) -> &DVector<f64> {
        &self.beta_inv_coords
    }

    /// `β^inv` in ambient coordinates.
    pub fn beta_inv(&self) -> &DVector<f64> {
        &self.beta_inv
    }

    /// Residual coordinates `(U^res)ᵀδ^res_t` for every offline position (rows).
    pub fn delta_res_offline(&self) -> &DMatrix<f64> {
        &self.delta_res_offline
    }

    pub fn delta_res_online(&self) -> &DVector<f64> {
        &self.delta_res_online
    }

    pub fn noise_sigma(&self) -> f64 {
        self.config.noise_sigma
    }

    /// `M = max_t ‖γ_{0,t}‖₂` over all offline and online rounds.
    pub fn param_bound(&self) -> f64 {
        self.param_bound
    }

    /// Feature norm cap `L`, once set from the offline log.
    pub fn feature_bound(&self) -> Option<f64> {
        self.feature_bound
    }

    pub fn set_feature_bound(&mut self, bound: f64) -> Result<()> {
        if !(bound > 0.0) || !bound.is_finite() {
            return invalid(format!("feature bound must be positive, got {bound}"));
        }
        self.feature_bound = Some(bound);
        Ok(())
    }

    fn check_round(&self, round: Round) -> Result<()> {
        match round {
            Round::Offline(tau) if tau >= 1 && tau <= self.config.t0 => Ok(()),
            Round::Online(t) if t >= 1 && t <= self.config.horizon => Ok(()),
            _ => Err(Error::InvalidInput(format!("round {round:?} out of range"))),
        }
    }

    /// Residual coordinates at a round.
    pub fn delta_res_coords(&self, round: Round) -> Result<DVector<f64>> {
        self.check_round(round)?;
        Ok(match round {
            Round::Offline(tau) => self.delta_res_offline.row(tau - 1).transpose(),
            Round::Online(_) => self.delta_res_online.clone(),
        })
    }

    /// `γ_{0,t} = β^inv + δ^res_t` in ambient coordinates.
    pub fn gamma(&self, round: Round) -> Result<DVector<f64>> {
        Ok(match round {
            Round::Online(_) => {
                self.check_round(round)?;
                self.gamma_online.clone()
            }
            Round::Offline(_) => &self.beta_inv + self.basis.u_res() * self.delta_res_coords(round)?,
        })
    }

    /// Diagonal of the block-diagonal spectrum `Ṽ_t` (invariant block first).
    pub fn spectrum(&self, round: Round) -> DVector<f64> {
        let scale = residual_scale(round, self.config.t0);
        let p_inv = self.config.p_inv();
        DVector::from_fn(self.config.p, |i, _| {
            if i < p_inv {
                self.inv_spectrum[i]
            } else {
                self.res_spectrum[i - p_inv] * scale
            }
        })
    }

    /// Feature covariance `U Ṽ_t Uᵀ`.
    pub fn feature_covariance(&self, round: Round) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.spectrum(round)) * self.u.transpose()
    }

    /// `K` independent draws from `N(0, U Ṽ_t Uᵀ)`, clipped to the feature bound if one is set.
    pub fn features_at<R: Rng + ?Sized>(&self, round: Round, rng: &mut R) -> Result<Vec<DVector<f64>>> {
        self.check_round(round)?;
        let sd = self.spectrum(round).map(f64::sqrt);
        Ok((0..self.config.n_actions)
            .map(|_| {
                let z = DVector::from_fn(self.config.p, |i, _| sd[i] * rng.sample::<f64, _>(StandardNormal));
                let mut phi = &self.u * z;
                if let Some(l) = self.feature_bound {
                    let norm = phi.norm();
                    if norm > l {
                        phi *= l / norm;
                    }
                }
                phi
            })
            .collect())
    }

    /// Noiseless reward `φᵀγ_{0,t}`.
    pub fn mean_reward(&self, round: Round, feature: &DVector<f64>) -> Result<f64> {
        Ok(feature.dot(&self.gamma(round)?))
    }

    /// `φᵀγ_{0,t} + ε` with `ε ~ N(0, σ²)`.
    pub fn reward<R: Rng + ?Sized>(&self, round: Round, feature: &DVector<f64>, rng: &mut R) -> Result<f64> {
        let eps: f64 = rng.sample(StandardNormal);
        Ok(self.mean_reward(round, feature)? + self.config.noise_sigma * eps)
    }

    /// Gap between the best candidate's mean reward and the chosen one's.
    pub fn instantaneous_regret(
        &self,
        round: Round,
        chosen: &DVector<f64>,
        candidates: &[DVector<f64>],
    ) -> Result<f64> {
        if !candidates.iter().any(|c| c == chosen) {
            return invalid("chosen feature is not among the candidates");
        }
        let gamma = self.gamma(round)?;
        let best = candidates.iter().map(|c| c.dot(&gamma)).fold(f64::NEG_INFINITY, f64::max);
        Ok((best - chosen.dot(&gamma)).max(0.0))
    }
}

impl Environment for SyntheticInstance {
    fn dim(&self) -> usize {
        self.config.p
    }

    fn candidates(&self, t: usize, rng: &mut dyn rand::RngCore) -> Result<Vec<DVector<f64>>> {
        self.features_at(Round::Online(t), rng)
    }

    fn mean_reward(&self, t: usize, feature: &DVector<f64>) -> Result<f64> {
        SyntheticInstance::mean_reward(self, Round::Online(t), feature)
    }

    fn noise_sigma(&self) -> f64 {
        self.config.noise_sigma
    }
}
