//! Estimate the invariant subspace from an offline log and compare it with
//! the ground truth at a few log lengths.

use isd_linucb::env::{generate_offline_log, InstanceConfig, SyntheticInstance};
use isd_linucb::subspace::{estimate_decomposition, principal_angle_distance, projection_distance, DecompositionOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> isd_linucb::Result<()> {
    for t0 in [1000, 3500, 8000] {
        let cfg = InstanceConfig {
            p: 10,
            p_res: 3,
            n_actions: 5,
            t0,
            horizon: 100,
            noise_sigma: 0.1,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = SyntheticInstance::sample(cfg, &mut rng)?;
        let log = generate_offline_log(&inst, &mut rng)?;
        let est = estimate_decomposition(&log.features(), &log.rewards(), &DecompositionOptions::default(), &mut rng)?;

        let (truth, found) = (inst.basis().u_inv(), est.basis.u_inv());
        let dist = if truth.ncols() == found.ncols() {
            principal_angle_distance(truth, found)?
        } else {
            projection_distance(truth, found)?
        };
        println!(
            "T0 = {t0:>4}: blocks {:?}, p_inv = {}, distance {dist:.4} (x sqrt(T0) = {:.2})",
            est.partition.blocks.iter().map(Vec::len).collect::<Vec<_>>(),
            est.basis.p_inv(),
            dist * (t0 as f64).sqrt()
        );
    }
    Ok(())
}
