//! Sample a synthetic instance, log it with a uniform policy and print the
//! first rows of the log as CSV.

use isd_linucb::env::{generate_offline_log, InstanceConfig, SyntheticInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> isd_linucb::Result<()> {
    let cfg = InstanceConfig {
        p: 6,
        p_res: 2,
        n_actions: 5,
        t0: 1000,
        horizon: 100,
        noise_sigma: 0.1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = SyntheticInstance::sample(cfg, &mut rng)?;
    let log = generate_offline_log(&inst, &mut rng)?;

    println!("beta_inv coords: {:.3?}", inst.beta_inv_coords().as_slice());
    println!("online delta coords: {:.3?}", inst.delta_res_online().as_slice());
    println!("M = {:.3}, lambda0_hat = {:.4}", inst.param_bound(), log.lambda0_hat());

    let mut buf = Vec::new();
    log.write_csv(&mut buf)?;
    for line in String::from_utf8_lossy(&buf).lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
