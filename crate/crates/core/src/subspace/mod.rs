//! Estimating, representing and comparing invariant subspace decompositions.

mod basis;
mod classify;
mod distance;
mod estimate;
mod gram;
mod jbd;

pub use basis::{assemble_basis, BlockLabel, BlockPartition, IsdBasis, BASIS_TOL};
pub use classify::{classify_blocks, Classification, Window, DEFAULT_TOL_MULTIPLIER};
pub use distance::{principal_angle_distance, projection_distance};
pub use estimate::{
    estimate_decomposition, window_bounds, DecompositionEstimate, DecompositionOptions, DEFAULT_DRIFT_ANCHOR_WEIGHT,
};
pub use gram::{centered_covariance, gram};
pub use jbd::{
    default_coupling_tol, joint_block_diagonalize, joint_block_diagonalize_weighted, JointBlockDiagonalization,
};
