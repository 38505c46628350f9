use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{orthonormality_defect, sym_op_norm};

/// Orthonormality tolerance accepted by the distance functions.
const ORTHO_TOL: f64 = 1e-8;

/// Sine of the largest principal angle between the column spans of `a` and `b`.
///
/// Both inputs must have orthonormal columns and equal shape. The value is
/// `sqrt(1 − σ_min(AᵀB)²)`, evaluated as `σ_max((I − AAᵀ)B)` which is the
/// same quantity without cancellation for nearly aligned subspaces. It equals
/// `‖AAᵀ − BBᵀ‖_op`.
pub fn principal_angle_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::InvalidInput(format!(
            "shape mismatch: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    check_orthonormal(a)?;
    check_orthonormal(b)?;
    if a.ncols() == 0 {
        return Ok(0.0);
    }
    let residual = b - a * (a.transpose() * b);
    let sv = residual.singular_values();
    Ok(sv.iter().fold(0.0f64, |m, &s| m.max(s)).min(1.0))
}

/// `‖Π_A − Π_B‖_op` for orthonormal bases of possibly different dimension.
///
/// Equals [`principal_angle_distance`] when the dimensions agree and 1 when
/// they differ (and both spans are proper, nonzero subspaces).
pub fn projection_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.nrows() != b.nrows() {
        return Err(Error::InvalidInput("ambient dimension mismatch".into()));
    }
    check_orthonormal(a)?;
    check_orthonormal(b)?;
    if a.ncols() == b.ncols() {
        return principal_angle_distance(a, b);
    }
    let diff = a * a.transpose() - b * b.transpose();
    Ok(sym_op_norm(&diff).min(1.0))
}

fn check_orthonormal(u: &DMatrix<f64>) -> Result<()> {
    let d = orthonormality_defect(u);
    if d > ORTHO_TOL {
        return Err(Error::InvalidInput(format!("columns not orthonormal (defect {d:.3e})")));
    }
    Ok(())
}
