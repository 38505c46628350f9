use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::linucb::UcbParams;
use super::radius::discounted_radius;
use super::{argmax, check_candidates, check_update, Policy};
use crate::error::{invalid, Result};
use crate::linalg::cholesky;

/// Discounted LinUCB: `V ← ρV + xxᵀ + (1−ρ)λI`, `Ṽ ← ρ²Ṽ + xxᵀ + (1−ρ²)λI`,
/// `b ← ρb + x·y`, exploration width `‖x‖_{V⁻¹ṼV⁻¹}`.
#[derive(Debug, Clone)]
pub struct DiscountedLinUcb {
    params: UcbParams,
    rho: f64,
    gram: DMatrix<f64>,
    gram_sq: DMatrix<f64>,
    moment: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    theta: DVector<f64>,
    n: usize,
}

impl DiscountedLinUcb {
    pub fn new(p: usize, rho: f64, params: UcbParams) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return invalid(format!("discount must lie in (0, 1), got {rho}"));
        }
        let gram = DMatrix::identity(p, p) * params.lambda;
        Ok(Self {
            params,
            rho,
            chol: cholesky(&gram)?,
            gram_sq: gram.clone(),
            gram,
            moment: DVector::zeros(p),
            theta: DVector::zeros(p),
            n: 0,
        })
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn moment(&self) -> &DVector<f64> {
        &self.moment
    }
}

impl Policy for DiscountedLinUcb {
    fn select_action(&mut self, candidates: &[DVector<f64>]) -> Result<usize> {
        let p = self.moment.len();
        check_candidates(candidates, p)?;
        let c = &self.params;
        let beta = discounted_radius(self.n, c.eta, c.l, c.m, c.sigma, c.lambda, p, self.rho)?;
        let scores: Vec<f64> = candidates
            .iter()
            .map(|x| {
                let y = self.chol.solve(x);
                self.theta.dot(x) + beta * y.dot(&(&self.gram_sq * &y)).max(0.0).sqrt()
            })
            .collect();
        argmax(&scores)
    }

    fn update(&mut self, feature: &DVector<f64>, reward: f64) -> Result<()> {
        let p = self.moment.len();
        check_update(feature, reward, p)?;
        let (rho, lambda) = (self.rho, self.params.lambda);
        self.gram *= rho;
        self.gram.ger(1.0, feature, feature, 1.0);
        for i in 0..p {
            self.gram[(i, i)] += (1.0 - rho) * lambda;
        }
        self.gram_sq *= rho * rho;
        self.gram_sq.ger(1.0, feature, feature, 1.0);
        for i in 0..p {
            self.gram_sq[(i, i)] += (1.0 - rho * rho) * lambda;
        }
        self.moment *= rho;
        self.moment.axpy(reward, feature, 1.0);
        self.chol = cholesky(&self.gram)?;
        self.theta = self.chol.solve(&self.moment);
        self.n += 1;
        Ok(())
    }
}
