//! ISD-linUCB at each oracle tier next to LinUCB, with the offline diagnostics.

use isd_linucb::harness::{build_policy, prepare_cell, run_episode, ExperimentConfig, Figure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> isd_linucb::Result<()> {
    let cfg = ExperimentConfig {
        sweep: None,
        ..Figure::Fig4.config()
    };
    let ctx = prepare_cell(&cfg, None, 21)?;
    for spec in &cfg.policies {
        let (mut policy, diag) = build_policy(spec, &ctx, 22)?;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let out = run_episode(ctx.environment.as_ref(), policy.as_mut(), ctx.horizon, &mut rng, Some(&ctx.gamma))?;
        print!("{:<22} final regret {:7.2}", spec.label(), out.cumulative.last().copied().unwrap_or(0.0));
        if let Some(d) = diag {
            print!("  dPi {:.3}  |beta err| {:.4}  covered {}", d.delta_pi_hat, d.beta_err, d.coverage_inv);
        }
        println!();
    }
    Ok(())
}
