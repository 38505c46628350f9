//! Small dense linear-algebra helpers shared by the estimators and policies.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Jitter added once to the diagonal when a Cholesky factorization fails.
pub const CHOLESKY_JITTER: f64 = 1e-10;

/// Cholesky with a single jitter retry.
pub fn cholesky(m: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Ok(c);
    }
    let n = m.nrows();
    let jittered = m + DMatrix::identity(n, n) * CHOLESKY_JITTER;
    Cholesky::new(jittered).ok_or_else(|| Error::RankDeficient {
        condition: condition_number(m),
    })
}

/// Largest condition number accepted by [`solve_cholesky`].
pub const MAX_CONDITION: f64 = 1e12;

/// Cholesky of an unregularized Gram matrix, rejecting numerically singular input.
pub fn solve_cholesky(m: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    let condition = condition_number(m);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::RankDeficient { condition });
    }
    cholesky(m)
}

/// Ratio of extreme eigenvalue magnitudes of a symmetric matrix.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let ev = SymmetricEigen::new(m.clone()).eigenvalues;
    let max = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let min = ev.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

pub fn max_abs_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// `max |UᵀU − I|` over entries.
pub fn orthonormality_defect(u: &DMatrix<f64>) -> f64 {
    let k = u.ncols();
    let g = u.transpose() * u;
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Symmetric eigendecomposition with eigenvalues sorted in descending order.
pub fn sorted_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Spectral norm of a symmetric matrix.
pub fn sym_op_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &b| a.max(b.abs()))
}

/// Columns of `u` selected by index, in the given order.
pub fn select_columns(u: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(u.nrows(), cols.len());
    for (dst, &src) in cols.iter().enumerate() {
        out.set_column(dst, &u.column(src));
    }
    out
}

/// `‖v‖_{A⁻¹}` given the Cholesky factor of `A`.
pub fn inverse_norm(chol: &Cholesky<f64, Dyn>, v: &DVector<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let y = chol.l().solve_lower_triangular(v).expect("cholesky factor is lower triangular and nonsingular");
    y.norm()
}

pub fn is_finite_vec(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}
