use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Regularized Gram matrix `reg·I_p + Σ φ φᵀ`.
///
/// `p` is needed to size the result when `features` is empty.
pub fn gram(features: &[DVector<f64>], p: usize, reg: f64) -> Result<DMatrix<f64>> {
    if !(reg >= 0.0) || !reg.is_finite() {
        return Err(Error::InvalidInput(format!("regularization must be finite and >= 0, got {reg}")));
    }
    let mut g = DMatrix::identity(p, p) * reg;
    for (i, phi) in features.iter().enumerate() {
        if phi.len() != p {
            return Err(Error::InvalidInput(format!(
                "feature {i} has dimension {} but p = {p}",
                phi.len()
            )));
        }
        g.ger(1.0, phi, phi, 1.0);
    }
    Ok(g)
}

/// Mean-centered sample covariance of a set of rows (divides by `n − 1`).
pub fn centered_covariance(features: &[DVector<f64>], p: usize) -> Result<DMatrix<f64>> {
    let n = features.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples for a covariance, got {n}")));
    }
    let mut mean = DVector::zeros(p);
    for phi in features {
        if phi.len() != p {
            return Err(Error::InvalidInput("feature dimension mismatch".into()));
        }
        mean += phi;
    }
    mean /= n as f64;
    let mut c = DMatrix::zeros(p, p);
    for phi in features {
        let d = phi - &mean;
        c.ger(1.0, &d, &d, 1.0);
    }
    Ok(c / (n as f64 - 1.0))
}
