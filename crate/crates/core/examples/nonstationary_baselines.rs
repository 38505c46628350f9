//! Sliding-window and discounted LinUCB next to plain LinUCB over a few seeds.

use isd_linucb::harness::{run_grid, ExperimentConfig, Figure, PolicySpec};

fn main() -> isd_linucb::Result<()> {
    let cfg = ExperimentConfig {
        policies: vec![
            PolicySpec::Linucb { label: None },
            PolicySpec::SwLinucb {
                label: Some("sw_25".into()),
                window: Some(25),
            },
            PolicySpec::SwLinucb {
                label: None,
                window: None,
            },
            PolicySpec::DLinucb {
                label: Some("d_0.95".into()),
                discount: 0.95,
            },
            PolicySpec::DLinucb {
                label: None,
                discount: 0.999,
            },
        ],
        sweep: None,
        n_repetitions: 10,
        ..Figure::Fig3.config()
    };
    let result = run_grid(&cfg, None)?;
    for spec in &cfg.policies {
        let label = spec.label();
        println!("{label:<10} mean final regret {:.2}", result.mean_final_regret(&label, None).unwrap_or(f64::NAN));
    }
    Ok(())
}
