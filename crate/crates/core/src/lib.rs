//! Non-stationary linear contextual bandits with an invariant subspace
//! decomposition: subspace estimation, UCB policies, synthetic environments and
//! a seeded experiment harness.

pub mod env;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod policy;
pub mod subspace;

pub use error::{Error, Result};
