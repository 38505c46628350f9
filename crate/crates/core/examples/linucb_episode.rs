//! LinUCB against uniform random on one synthetic instance.

use isd_linucb::harness::{build_policy, prepare_cell, run_episode, ExperimentConfig, Figure, PolicySpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> isd_linucb::Result<()> {
    let cfg = ExperimentConfig {
        policies: vec![PolicySpec::Linucb { label: None }, PolicySpec::Uniform { label: None }],
        sweep: None,
        ..Figure::Fig3.config()
    };
    let ctx = prepare_cell(&cfg, None, 11)?;
    for spec in &cfg.policies {
        let (mut policy, _) = build_policy(spec, &ctx, 12)?;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let out = run_episode(ctx.environment.as_ref(), policy.as_mut(), ctx.horizon, &mut rng, None)?;
        let at = |t: usize| out.cumulative[t - 1];
        println!(
            "{:<8} regret at t=10: {:6.2}  t=50: {:6.2}  t=100: {:6.2}",
            spec.label(),
            at(10),
            at(50),
            at(100)
        );
    }
    Ok(())
}
