//! Label each block of a joint block diagonalization as invariant or residual
//! by comparing per-window regression coefficients.

use nalgebra::{DMatrix, DVector};

use super::basis::{BlockLabel, BlockPartition};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, select_columns, solve_cholesky};

/// Multiplier of the default invariance tolerance.
pub const DEFAULT_TOL_MULTIPLIER: f64 = 6.0;

/// One window of `(feature, reward)` observations.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    pub features: &'a [DVector<f64>],
    pub rewards: &'a [f64],
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub partition: BlockPartition,
    /// Max pairwise 2-norm distance of the per-window coefficients, per block.
    pub spreads: Vec<f64>,
    /// Mean across-window variance of the block coefficients, per block.
    pub coefficient_variances: Vec<f64>,
    /// Tolerance applied to each block.
    pub tolerances: Vec<f64>,
    /// Pooled residual standard deviation of the per-window fits.
    pub sigma_hat: f64,
    pub diagnostics: Vec<String>,
}

impl Classification {
    /// Relabel the block with the largest coefficient variance as residual
    /// when every block was found invariant. Returns the relabeled block.
    pub fn ensure_residual(&mut self) -> Option<usize> {
        if self.partition.has_residual() || self.partition.blocks.is_empty() {
            return None;
        }
        let idx = self
            .coefficient_variances
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)?;
        self.partition.labels[idx] = BlockLabel::Residual;
        self.diagnostics
            .push(format!("all blocks invariant; forced block {idx} to residual"));
        Some(idx)
    }
}

/// Per-window coefficients of the rewards regressed on all coordinates `Uᵀφ`.
struct WindowFit {
    coefs: Option<DVector<f64>>,
    rss: f64,
    dof: f64,
}

fn fit_window(z: &DMatrix<f64>, r: &DVector<f64>) -> WindowFit {
    let (n, p) = z.shape();
    let g = z.transpose() * z;
    match (n > p).then(|| solve_cholesky(&g).ok()).flatten() {
        Some(chol) => {
            let coefs = chol.solve(&(z.transpose() * r));
            let resid = r - z * &coefs;
            WindowFit {
                coefs: Some(coefs),
                rss: resid.norm_squared(),
                dof: (n - p) as f64,
            }
        }
        None => WindowFit { coefs: None, rss: 0.0, dof: 0.0 },
    }
}

/// Classify blocks of `u` as invariant or residual.
///
/// For each window, the rewards are regressed on the coordinates `Uᵀφ`; a
/// block is invariant iff the largest pairwise 2-norm distance between its
/// per-window coefficient vectors is at most the tolerance. When
/// `invariance_tol` is `None`, block `b` uses
/// `6·σ̂·sqrt(p_b·m / (n·λ_b))`, with `n` the pooled sample count and `λ_b`
/// the smallest eigenvalue of the block's pooled normalized second-moment
/// matrix.
///
/// If a window's full regression is singular the block is refitted on its own
/// coordinates; a block that is singular even then is labeled residual.
pub fn classify_blocks(
    blocks: &[Vec<usize>],
    u: &DMatrix<f64>,
    windows: &[Window<'_>],
    invariance_tol: Option<f64>,
) -> Result<Classification> {
    let p = u.nrows();
    super::basis::validate_blocks(blocks, p)?;
    if windows.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 windows".into()));
    }
    if let Some(t) = invariance_tol {
        if !(t > 0.0) {
            return Err(Error::InvalidInput(format!("invariance tolerance must be positive, got {t}")));
        }
    }
    let m = windows.len();
    let largest = blocks.iter().map(Vec::len).max().unwrap_or(0);

    let mut diagnostics = Vec::new();
    let mut projected = Vec::with_capacity(m);
    let mut fits = Vec::with_capacity(m);
    let mut total_n = 0usize;
    for (w, win) in windows.iter().enumerate() {
        if win.features.len() != win.rewards.len() {
            return Err(Error::InvalidInput(format!("window {w}: features/rewards length mismatch")));
        }
        if win.features.len() < largest {
            return Err(Error::InvalidInput(format!(
                "window {w} has {} observations, fewer than the largest block ({largest})",
                win.features.len()
            )));
        }
        let n = win.features.len();
        total_n += n;
        let mut x = DMatrix::zeros(n, p);
        for (i, phi) in win.features.iter().enumerate() {
            if phi.len() != p {
                return Err(Error::InvalidInput(format!("window {w}: feature dimension mismatch")));
            }
            x.set_row(i, &phi.transpose());
        }
        let z = x * u;
        let r = DVector::from_column_slice(win.rewards);
        let fit = fit_window(&z, &r);
        if fit.coefs.is_none() {
            diagnostics.push(format!("window {w}: singular full regression, using per-block fits"));
        }
        fits.push(fit);
        projected.push((z, r));
    }
    let (rss, dof) = fits.iter().fold((0.0, 0.0), |(a, b), f| (a + f.rss, b + f.dof));
    let sigma_hat = if dof > 0.0 { (rss / dof).sqrt() } else { 0.0 };

    let mut spreads = Vec::with_capacity(blocks.len());
    let mut variances = Vec::with_capacity(blocks.len());
    let mut noise_tols = Vec::with_capacity(blocks.len());

    'blocks: for (bi, block) in blocks.iter().enumerate() {
        let mut coefs: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut second_moment = DMatrix::zeros(block.len(), block.len());
        for (w, ((z, r), fit)) in projected.iter().zip(&fits).enumerate() {
            let zb = select_columns(z, block);
            second_moment += zb.transpose() * &zb;
            let c = match &fit.coefs {
                Some(full) => DVector::from_iterator(block.len(), block.iter().map(|&j| full[j])),
                None => {
                    let g = zb.transpose() * &zb;
                    match solve_cholesky(&g) {
                        Ok(ch) => ch.solve(&(zb.transpose() * r)),
                        Err(_) => {
                            diagnostics.push(format!(
                                "block {bi}: singular gram in window {w}, labeled residual"
                            ));
                            spreads.push(f64::INFINITY);
                            variances.push(f64::INFINITY);
                            noise_tols.push(f64::NAN);
                            continue 'blocks;
                        }
                    }
                }
            };
            coefs.push(c);
        }

        let mut spread = 0.0f64;
        for a in 0..coefs.len() {
            for b in (a + 1)..coefs.len() {
                spread = spread.max((&coefs[a] - &coefs[b]).norm());
            }
        }
        let mean = coefs.iter().fold(DVector::zeros(block.len()), |acc, c| acc + c) / m as f64;
        let var = coefs.iter().map(|c| (c - &mean).norm_squared()).sum::<f64>()
            / ((m - 1) as f64 * block.len() as f64);
        let lam = (min_eigenvalue(&second_moment) / total_n as f64).max(f64::MIN_POSITIVE);
        spreads.push(spread);
        variances.push(var);
        noise_tols.push(
            DEFAULT_TOL_MULTIPLIER * sigma_hat * (block.len() as f64 * m as f64 / (total_n as f64 * lam)).sqrt(),
        );
    }

    let tolerances: Vec<f64> = noise_tols
        .iter()
        .map(|&t| if t.is_nan() { t } else { invariance_tol.unwrap_or(t) })
        .collect();
    let labels = spreads
        .iter()
        .zip(&tolerances)
        .map(|(&s, &t)| if s <= t { BlockLabel::Invariant } else { BlockLabel::Residual })
        .collect();

    Ok(Classification {
        partition: BlockPartition::new(blocks.to_vec(), labels)?,
        spreads,
        coefficient_variances: variances,
        tolerances,
        sigma_hat,
        diagnostics,
    })
}
