//! Approximate joint block diagonalization of symmetric matrices.
//!
//! A generic random convex combination of the inputs is eigendecomposed to
//! get a starting basis, which is then refined by Jacobi sweeps that minimize
//! the summed squared off-diagonal mass of all inputs at once. Columns are
//! grouped into blocks as the connected components of a coupling graph.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{max_abs_asymmetry, sorted_eigen};

const MAX_SWEEPS: usize = 100;
const ROTATION_EPS: f64 = 1e-13;
/// Relative coupling threshold used when none is supplied.
pub const DEFAULT_RELATIVE_COUPLING: f64 = 0.05;

/// Output of [`joint_block_diagonalize`].
#[derive(Debug, Clone)]
pub struct JointBlockDiagonalization {
    /// Orthonormal `p×p` basis.
    pub u: DMatrix<f64>,
    /// Column-index blocks, sorted by their smallest column.
    pub blocks: Vec<Vec<usize>>,
    /// Largest off-block entry of `UᵀC_iU` over all inputs, in normalized units.
    pub max_off_block: f64,
    /// Threshold that was applied, in normalized units.
    pub coupling_tol: f64,
}

/// Scale each matrix by `p / trace` so that its mean eigenvalue is one.
fn normalized(covs: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    covs.iter()
        .map(|c| {
            let p = c.nrows() as f64;
            let tr = c.trace();
            if tr > 0.0 {
                c * (p / tr)
            } else {
                c.clone()
            }
        })
        .collect()
}

/// Default threshold: 5% of the largest diagonal entry across the normalized inputs.
pub fn default_coupling_tol(covs: &[DMatrix<f64>]) -> f64 {
    let max_diag = normalized(covs)
        .iter()
        .flat_map(|c| c.diagonal().iter().copied().collect::<Vec<_>>())
        .fold(0.0f64, f64::max);
    DEFAULT_RELATIVE_COUPLING * max_diag
}

fn validate(covs: &[DMatrix<f64>]) -> Result<usize> {
    if covs.len() < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 matrices, got {}", covs.len())));
    }
    let p = covs[0].nrows();
    for (i, c) in covs.iter().enumerate() {
        if c.nrows() != p || c.ncols() != p {
            return Err(Error::InvalidInput(format!("matrix {i} is not {p}x{p}")));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("matrix {i} has non-finite entries")));
        }
        let scale = c.amax().max(1.0);
        if max_abs_asymmetry(c) > 1e-9 * scale {
            return Err(Error::InvalidInput(format!("matrix {i} is not symmetric")));
        }
    }
    Ok(p)
}

/// Jointly block diagonalize `covs`.
///
/// `coupling_tol` is expressed in units of the trace-normalized inputs
/// (`C_i · p / tr C_i`); `None` selects [`default_coupling_tol`]. Columns `j`
/// and `k` share a block iff `max_i |u_jᵀ C_i u_k| > coupling_tol` links them,
/// directly or transitively.
pub fn joint_block_diagonalize<R: Rng + ?Sized>(
    covs: &[DMatrix<f64>],
    coupling_tol: Option<f64>,
    rng: &mut R,
) -> Result<JointBlockDiagonalization> {
    joint_block_diagonalize_weighted(covs, &vec![1.0; covs.len()], coupling_tol, rng)
}

/// [`joint_block_diagonalize`] with the normalized inputs scaled by `weights`.
pub fn joint_block_diagonalize_weighted<R: Rng + ?Sized>(
    covs: &[DMatrix<f64>],
    weights: &[f64],
    coupling_tol: Option<f64>,
    rng: &mut R,
) -> Result<JointBlockDiagonalization> {
    let p = validate(covs)?;
    if weights.len() != covs.len() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidInput("need one positive finite weight per matrix".into()));
    }
    let tol = coupling_tol.unwrap_or_else(|| default_coupling_tol(covs));
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("coupling tolerance must be positive, got {tol}")));
    }
    let norm: Vec<DMatrix<f64>> = normalized(covs).into_iter().zip(weights).map(|(c, w)| c * *w).collect();

    let mix_weights: Vec<f64> = (0..covs.len()).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = mix_weights.iter().sum();
    let mut mix = DMatrix::zeros(p, p);
    for (w, c) in mix_weights.iter().zip(&norm) {
        mix += c * (w / total);
    }
    let (_, mut u) = sorted_eigen(&mix);
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("eigendecomposition produced non-finite values".into()));
    }

    let mut rotated: Vec<DMatrix<f64>> = norm.iter().map(|c| u.transpose() * c * &u).collect();
    jacobi_refine(&mut u, &mut rotated);

    let mut coupling = DMatrix::<f64>::zeros(p, p);
    for b in &rotated {
        for j in 0..p {
            for k in 0..p {
                if j != k {
                    coupling[(j, k)] = coupling[(j, k)].max(b[(j, k)].abs());
                }
            }
        }
    }
    let blocks = connected_components(&coupling, tol);
    let mut max_off_block = 0.0f64;
    let mut owner = vec![0usize; p];
    for (bi, block) in blocks.iter().enumerate() {
        for &c in block {
            owner[c] = bi;
        }
    }
    for j in 0..p {
        for k in 0..p {
            if owner[j] != owner[k] {
                max_off_block = max_off_block.max(coupling[(j, k)]);
            }
        }
    }

    Ok(JointBlockDiagonalization {
        u,
        blocks,
        max_off_block,
        coupling_tol: tol,
    })
}

/// Jacobi sweeps minimizing `Σ_i off(UᵀC_iU)`; `rotated` holds `UᵀC_iU` and is kept in sync.
fn jacobi_refine(u: &mut DMatrix<f64>, rotated: &mut [DMatrix<f64>]) {
    let p = u.nrows();
    for _ in 0..MAX_SWEEPS {
        let mut largest = 0.0f64;
        for i in 0..p {
            for j in (i + 1)..p {
                let (mut g11, mut g12, mut g22) = (0.0, 0.0, 0.0);
                for b in rotated.iter() {
                    let diff = b[(i, i)] - b[(j, j)];
                    let off = b[(i, j)] + b[(j, i)];
                    g11 += diff * diff;
                    g12 += diff * off;
                    g22 += off * off;
                }
                let angle = 0.25 * (2.0 * g12).atan2(g11 - g22);
                let (s, c) = angle.sin_cos();
                if s.abs() <= ROTATION_EPS {
                    continue;
                }
                largest = largest.max(s.abs());
                rotate_columns(u, i, j, c, s);
                for b in rotated.iter_mut() {
                    rotate_columns(b, i, j, c, s);
                    rotate_rows(b, i, j, c, s);
                }
            }
        }
        if largest <= ROTATION_EPS {
            break;
        }
    }
}

// col_i ← c·col_i + s·col_j ; col_j ← −s·col_i + c·col_j
fn rotate_columns(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let a = m[(r, i)];
        let b = m[(r, j)];
        m[(r, i)] = c * a + s * b;
        m[(r, j)] = -s * a + c * b;
    }
}

fn rotate_rows(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for col in 0..m.ncols() {
        let a = m[(i, col)];
        let b = m[(j, col)];
        m[(i, col)] = c * a + s * b;
        m[(j, col)] = -s * a + c * b;
    }
}

fn connected_components(coupling: &DMatrix<f64>, tol: f64) -> Vec<Vec<usize>> {
    let p = coupling.nrows();
    let mut parent: Vec<usize> = (0..p).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..p {
        for k in (j + 1)..p {
            if coupling[(j, k)].max(coupling[(k, j)]) > tol {
                let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut index_of_root = vec![usize::MAX; p];
    for c in 0..p {
        let r = find(&mut parent, c);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[index_of_root[r]].push(c);
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isotropic_inputs_give_singletons() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let covs = vec![DMatrix::identity(4, 4), DMatrix::identity(4, 4)];
        let out = joint_block_diagonalize(&covs, Some(1e-6), &mut rng).unwrap();
        assert_eq!(out.blocks.len(), 4);
        assert!(crate::linalg::orthonormality_defect(&out.u) < 1e-12);
    }

    #[test]
    fn diagonal_inputs_recover_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let covs = vec![
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0])),
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 5.0, 6.0])),
        ];
        let out = joint_block_diagonalize(&covs, Some(1e-8), &mut rng).unwrap();
        assert_eq!(out.blocks.len(), 3);
        for col in out.u.column_iter() {
            let big = col.iter().filter(|x| x.abs() > 1.0 - 1e-10).count();
            let small = col.iter().filter(|x| x.abs() < 1e-10).count();
            assert_eq!((big, small), (1, 2));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let one = vec![DMatrix::identity(2, 2)];
        assert!(joint_block_diagonalize(&one, None, &mut rng).is_err());
        let asym = vec![
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]),
            DMatrix::identity(2, 2),
        ];
        assert!(matches!(
            joint_block_diagonalize(&asym, None, &mut rng),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn components_are_transitive() {
        let mut c = DMatrix::zeros(4, 4);
        c[(0, 2)] = 1.0;
        c[(2, 3)] = 1.0;
        let blocks = connected_components(&c, 0.5);
        assert_eq!(blocks, vec![vec![0, 2, 3], vec![1]]);
    }
}
