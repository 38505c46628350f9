use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::basis::{assemble_basis, BlockPartition, IsdBasis};
use super::classify::{classify_blocks, Classification, Window};
use super::gram::centered_covariance;
use super::jbd::{default_coupling_tol, joint_block_diagonalize_weighted, JointBlockDiagonalization, DEFAULT_RELATIVE_COUPLING};
use crate::error::{Error, Result};
use crate::linalg::solve_cholesky;

/// Sampling-noise multiplier for the coupling threshold on estimated covariances.
const NOISE_COUPLING_Z: f64 = 4.5;
/// Ratio of coefficient scatter to its expected noise needed to use it as an anchor.
const DRIFT_SIGNIFICANCE: f64 = 4.0;
/// Relative weight of the coefficient scatter, in trace-normalized units.
pub const DEFAULT_DRIFT_ANCHOR_WEIGHT: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecompositionOptions {
    /// Number of equal windows the offline log is split into.
    pub n_windows: usize,
    /// Absolute coupling threshold in normalized units; derived from the window size when `None`.
    pub coupling_tol: Option<f64>,
    /// Absolute invariance threshold; derived from the fit noise when `None`.
    pub invariance_tol: Option<f64>,
    /// Weight of the per-window coefficient scatter added to the jointly
    /// diagonalized matrices when it is significant; 0 disables it.
    pub drift_anchor_weight: f64,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        Self {
            n_windows: 8,
            coupling_tol: None,
            invariance_tol: None,
            drift_anchor_weight: DEFAULT_DRIFT_ANCHOR_WEIGHT,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionEstimate {
    pub basis: IsdBasis,
    pub partition: BlockPartition,
    pub jbd: JointBlockDiagonalization,
    pub classification: Classification,
}

/// Contiguous, nearly equal windows `[floor(i·n/m), floor((i+1)·n/m))`.
pub fn window_bounds(n: usize, m: usize) -> Vec<(usize, usize)> {
    (0..m).map(|i| (i * n / m, (i + 1) * n / m)).collect()
}

/// Scatter `Σ_w (γ̂_w − γ̄)(γ̂_w − γ̄)ᵀ` of the per-window OLS coefficients,
/// or `None` if some window is singular or the scatter is not clearly above
/// its sampling noise.
fn coefficient_drift(
    features: &[DVector<f64>],
    rewards: &[f64],
    bounds: &[(usize, usize)],
    p: usize,
) -> Option<DMatrix<f64>> {
    let mut coefs = Vec::with_capacity(bounds.len());
    let mut noise = 0.0;
    for &(a, b) in bounds {
        let mut g = DMatrix::zeros(p, p);
        let mut rhs = DVector::zeros(p);
        for (f, &r) in features[a..b].iter().zip(&rewards[a..b]) {
            g.ger(1.0, f, f, 1.0);
            rhs.axpy(r, f, 1.0);
        }
        let chol = solve_cholesky(&g).ok()?;
        let c = chol.solve(&rhs);
        let rss: f64 = features[a..b].iter().zip(&rewards[a..b]).map(|(f, &r)| (r - f.dot(&c)).powi(2)).sum();
        let dof = (b - a).checked_sub(p).filter(|&d| d > 0)? as f64;
        noise += rss / dof * chol.inverse().trace();
        coefs.push(c);
    }
    let m = coefs.len() as f64;
    let mean = coefs.iter().fold(DVector::zeros(p), |acc, c| acc + c) / m;
    let mut scatter = DMatrix::zeros(p, p);
    for c in &coefs {
        let d = c - &mean;
        scatter.ger(1.0, &d, &d, 1.0);
    }
    (scatter.trace() > DRIFT_SIGNIFICANCE * noise).then_some(scatter)
}

/// Estimate the invariant subspace decomposition from a chronologically
/// ordered sequence of `(feature, reward)` observations.
pub fn estimate_decomposition<R: Rng + ?Sized>(
    features: &[DVector<f64>],
    rewards: &[f64],
    opts: &DecompositionOptions,
    rng: &mut R,
) -> Result<DecompositionEstimate> {
    let n = features.len();
    if n != rewards.len() {
        return Err(Error::InvalidInput("features/rewards length mismatch".into()));
    }
    let p = features.first().map(|f| f.len()).ok_or_else(|| Error::InvalidInput("empty log".into()))?;
    let m = opts.n_windows;
    if m < 2 {
        return Err(Error::InvalidInput("need at least 2 windows".into()));
    }
    if !(opts.drift_anchor_weight >= 0.0 && opts.drift_anchor_weight.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "drift anchor weight must be finite and nonnegative, got {}",
            opts.drift_anchor_weight
        )));
    }
    if n < m * (p + 2) {
        return Err(Error::InvalidInput(format!(
            "{n} observations are too few for {m} windows in dimension {p}"
        )));
    }
    let bounds = window_bounds(n, m);
    let covs = bounds
        .iter()
        .map(|&(a, b)| centered_covariance(&features[a..b], p))
        .collect::<Result<Vec<DMatrix<f64>>>>()?;

    let coupling_tol = opts.coupling_tol.unwrap_or_else(|| {
        let min_window = bounds.iter().map(|(a, b)| b - a).min().unwrap_or(1) as f64;
        let max_diag = default_coupling_tol(&covs) / DEFAULT_RELATIVE_COUPLING;
        max_diag * DEFAULT_RELATIVE_COUPLING.max(NOISE_COUPLING_Z / min_window.sqrt())
    });
    let mut weights = vec![1.0; covs.len()];
    let mut inputs = covs;
    if opts.drift_anchor_weight > 0.0 {
        if let Some(d) = coefficient_drift(features, rewards, &bounds, p) {
            inputs.push(d);
            weights.push(opts.drift_anchor_weight);
        }
    }
    let jbd = joint_block_diagonalize_weighted(&inputs, &weights, Some(coupling_tol), rng)?;

    let windows: Vec<Window<'_>> = bounds
        .iter()
        .map(|&(a, b)| Window {
            features: &features[a..b],
            rewards: &rewards[a..b],
        })
        .collect();
    let mut classification = classify_blocks(&jbd.blocks, &jbd.u, &windows, opts.invariance_tol)?;
    classification.ensure_residual();
    let partition = classification.partition.clone();
    let basis = assemble_basis(&partition, &jbd.u)?;
    Ok(DecompositionEstimate {
        basis,
        partition,
        jbd,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_cover_range() {
        let w = window_bounds(10, 3);
        assert_eq!(w, vec![(0, 3), (3, 6), (6, 10)]);
        assert_eq!(window_bounds(16, 8).iter().map(|(a, b)| b - a).sum::<usize>(), 16);
    }
}
