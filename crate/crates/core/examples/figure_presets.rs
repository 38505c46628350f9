//! Run the four figure presets and print mean final regret per policy and sweep value.

use isd_linucb::harness::{run_grid, Figure};

fn main() -> isd_linucb::Result<()> {
    for fig in Figure::ALL {
        let cfg = fig.config();
        let result = run_grid(&cfg, None)?;
        println!("{} ({} traces)", fig.name(), result.traces.len());
        for spec in &cfg.policies {
            let label = spec.label();
            let means: Vec<String> = cfg
                .sweep_values()
                .into_iter()
                .map(|v| format!("{:.2}", result.mean_final_regret(&label, v).unwrap_or(f64::NAN)))
                .collect();
            println!("  {label:<22} {}", means.join("  "));
        }
    }
    Ok(())
}
