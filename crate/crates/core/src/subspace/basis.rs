use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthonormality_defect, select_columns};

/// Tolerance for the orthonormality and orthogonality invariants of [`IsdBasis`].
pub const BASIS_TOL: f64 = 1e-10;

/// Orthonormal bases of the invariant and residual subspaces.
///
/// `u_inv` may have zero columns (no invariant directions); `u_res` always
/// has at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct IsdBasis {
    u_inv: DMatrix<f64>,
    u_res: DMatrix<f64>,
}

impl IsdBasis {
    pub fn new(u_inv: DMatrix<f64>, u_res: DMatrix<f64>) -> Result<Self> {
        let p = u_res.nrows();
        if u_inv.nrows() != p {
            return Err(Error::InvalidInput(format!(
                "basis row mismatch: u_inv has {} rows, u_res has {}",
                u_inv.nrows(),
                p
            )));
        }
        if u_res.ncols() == 0 {
            return Err(Error::InvalidPartition("residual subspace must be nonempty".into()));
        }
        if u_inv.ncols() + u_res.ncols() != p {
            return Err(Error::InvalidInput(format!(
                "p_inv + p_res = {} but p = {}",
                u_inv.ncols() + u_res.ncols(),
                p
            )));
        }
        let basis = Self { u_inv, u_res };
        let defect = basis.max_defect();
        if defect > BASIS_TOL {
            return Err(Error::InvalidInput(format!(
                "basis is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(basis)
    }

    /// Split an orthonormal `p×p` matrix into invariant and residual column groups.
    pub fn from_columns(u: &DMatrix<f64>, inv_cols: &[usize], res_cols: &[usize]) -> Result<Self> {
        Self::new(select_columns(u, inv_cols), select_columns(u, res_cols))
    }

    /// The trivial decomposition with no invariant directions and `U^res = I_p`.
    pub fn all_residual(p: usize) -> Self {
        Self {
            u_inv: DMatrix::zeros(p, 0),
            u_res: DMatrix::identity(p, p),
        }
    }

    pub fn u_inv(&self) -> &DMatrix<f64> {
        &self.u_inv
    }

    pub fn u_res(&self) -> &DMatrix<f64> {
        &self.u_res
    }

    pub fn p(&self) -> usize {
        self.u_res.nrows()
    }

    pub fn p_inv(&self) -> usize {
        self.u_inv.ncols()
    }

    pub fn p_res(&self) -> usize {
        self.u_res.ncols()
    }

    /// `Π^inv = U^inv (U^inv)ᵀ`.
    pub fn projection_inv(&self) -> DMatrix<f64> {
        &self.u_inv * self.u_inv.transpose()
    }

    /// `Π^res = U^res (U^res)ᵀ`.
    pub fn projection_res(&self) -> DMatrix<f64> {
        &self.u_res * self.u_res.transpose()
    }

    /// Largest violation among the orthonormality and cross-orthogonality invariants.
    pub fn max_defect(&self) -> f64 {
        let cross = (self.u_inv.transpose() * &self.u_res).amax();
        orthonormality_defect(&self.u_inv)
            .max(orthonormality_defect(&self.u_res))
            .max(cross)
    }
}

/// Label attached to each block of a [`BlockPartition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockLabel {
    Invariant,
    Residual,
}

/// Disjoint column-index blocks covering `0..p`, each tagged invariant or residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub blocks: Vec<Vec<usize>>,
    pub labels: Vec<BlockLabel>,
}

impl BlockPartition {
    pub fn new(blocks: Vec<Vec<usize>>, labels: Vec<BlockLabel>) -> Result<Self> {
        if blocks.len() != labels.len() {
            return Err(Error::InvalidPartition(format!(
                "{} blocks but {} labels",
                blocks.len(),
                labels.len()
            )));
        }
        Ok(Self { blocks, labels })
    }

    /// Check that blocks are disjoint and cover exactly `0..p`.
    pub fn validate_cover(&self, p: usize) -> Result<()> {
        validate_blocks(&self.blocks, p)
    }

    pub fn has_residual(&self) -> bool {
        self.labels.contains(&BlockLabel::Residual)
    }

    pub fn columns_with(&self, label: BlockLabel) -> Vec<usize> {
        let mut cols: Vec<usize> = self
            .blocks
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| **l == label)
            .flat_map(|(b, _)| b.iter().copied())
            .collect();
        cols.sort_unstable();
        cols
    }
}

pub(crate) fn validate_blocks(blocks: &[Vec<usize>], p: usize) -> Result<()> {
    let mut seen = vec![false; p];
    for block in blocks {
        if block.is_empty() {
            return Err(Error::InvalidPartition("empty block".into()));
        }
        for &c in block {
            if c >= p {
                return Err(Error::InvalidPartition(format!("column {c} out of range for p = {p}")));
            }
            if seen[c] {
                return Err(Error::InvalidPartition(format!("column {c} appears in two blocks")));
            }
            seen[c] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPartition(format!("column {missing} not covered")));
    }
    Ok(())
}

/// Stack invariant-labeled columns of `u` into `U^inv` and the rest into `U^res`.
pub fn assemble_basis(partition: &BlockPartition, u: &DMatrix<f64>) -> Result<IsdBasis> {
    if u.nrows() != u.ncols() {
        return Err(Error::InvalidInput("U must be square".into()));
    }
    partition.validate_cover(u.ncols())?;
    if !partition.has_residual() {
        return Err(Error::InvalidPartition("no residual block".into()));
    }
    IsdBasis::from_columns(
        u,
        &partition.columns_with(BlockLabel::Invariant),
        &partition.columns_with(BlockLabel::Residual),
    )
}
