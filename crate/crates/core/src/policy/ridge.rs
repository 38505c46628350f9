use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::Result;
use crate::linalg::{cholesky, inverse_norm};

/// Regularized least-squares statistics `V = λI + Σ xxᵀ`, `b = Σ x·y` with a
/// cached factorization of `V`.
#[derive(Debug, Clone)]
pub struct RidgeState {
    gram: DMatrix<f64>,
    moment: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    theta: DVector<f64>,
}

impl RidgeState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        let gram = DMatrix::identity(dim, dim) * lambda;
        Self::from_parts(gram, DVector::zeros(dim))
    }

    pub fn from_parts(gram: DMatrix<f64>, moment: DVector<f64>) -> Result<Self> {
        let chol = cholesky(&gram)?;
        let theta = chol.solve(&moment);
        Ok(Self {
            gram,
            moment,
            chol,
            theta,
        })
    }

    pub fn update(&mut self, x: &DVector<f64>, y: f64) -> Result<()> {
        self.gram.ger(1.0, x, x, 1.0);
        self.moment.axpy(y, x, 1.0);
        self.refresh()
    }

    fn refresh(&mut self) -> Result<()> {
        self.chol = cholesky(&self.gram)?;
        self.theta = self.chol.solve(&self.moment);
        Ok(())
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn moment(&self) -> &DVector<f64> {
        &self.moment
    }

    /// Ridge estimate `V⁻¹b`.
    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    /// `‖x‖_{V⁻¹}`.
    pub fn width(&self, x: &DVector<f64>) -> f64 {
        inverse_norm(&self.chol, x)
    }

    pub fn dim(&self) -> usize {
        self.moment.len()
    }
}
