//! LinUCB regret on hypercube instances grows with the dimension.

use isd_linucb::env::InstanceConfig;
use isd_linucb::harness::{run_grid, EnvironmentKind, ExperimentConfig, PolicySpec, Sweep, SweepParam};

fn main() -> isd_linucb::Result<()> {
    let cfg = ExperimentConfig {
        name: "hypercube".into(),
        environment: EnvironmentKind::Hypercube,
        instance: InstanceConfig {
            p: 2,
            p_res: 1,
            n_actions: 2,
            t0: 1,
            horizon: 400,
            noise_sigma: 1.0,
        },
        policies: vec![PolicySpec::Linucb { label: None }],
        sweep: Some(Sweep {
            param: SweepParam::P,
            values: vec![2.0, 4.0, 8.0],
        }),
        n_repetitions: 20,
        root_seed: 1,
        lambda: 0.1,
        eta: None,
        fixed_instance: false,
        paired_sweep: false,
    };
    let result = run_grid(&cfg, None)?;
    for p in [2.0, 4.0, 8.0] {
        let mean = result.mean_final_regret("linucb", Some(p)).unwrap_or(f64::NAN);
        println!("p = {p}: mean regret at T = 400 is {mean:.1} ({:.2} per dimension)", mean / p);
    }
    Ok(())
}
