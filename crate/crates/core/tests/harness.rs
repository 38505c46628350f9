use std::collections::HashSet;
use std::path::Path;
use std::process::Command;

use isd_linucb::env::InstanceConfig;
use isd_linucb::harness::seeds::{child_seed, CellSeeds};
use isd_linucb::harness::{
    aggregate, build_policy, export, prepare_cell, read_csv, read_json, records, run_episode, run_grid,
    EnvironmentKind, ExperimentConfig, Figure, Format, GridResult, PolicySpec, Sweep, SweepParam, COLUMNS,
    THREADS_ENV,
};
use isd_linucb::policy::OracleTier;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_config(policies: Vec<PolicySpec>, reps: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: "small".into(),
        environment: EnvironmentKind::Synthetic,
        instance: InstanceConfig {
            p: 6,
            p_res: 2,
            n_actions: 5,
            t0: 600,
            horizon: 60,
            noise_sigma: 0.1,
        },
        policies,
        sweep: Some(Sweep {
            param: SweepParam::PRes,
            values: vec![1.0, 3.0],
        }),
        n_repetitions: reps,
        root_seed: 42,
        lambda: 0.1,
        eta: None,
        fixed_instance: false,
        paired_sweep: false,
    }
}

fn all_policies() -> Vec<PolicySpec> {
    vec![
        PolicySpec::Linucb { label: None },
        PolicySpec::SwLinucb {
            label: None,
            window: Some(20),
        },
        PolicySpec::DLinucb {
            label: None,
            discount: 0.99,
        },
        PolicySpec::Uniform { label: None },
        PolicySpec::isd(OracleTier::SubspacesAndBeta),
        PolicySpec::isd(OracleTier::Subspaces),
        PolicySpec::isd(OracleTier::None),
    ]
}

fn bits(r: &GridResult) -> Vec<(String, usize, Vec<u64>, Vec<usize>)> {
    r.traces
        .iter()
        .map(|t| {
            let mut b: Vec<u64> = t.instantaneous.iter().chain(&t.cumulative).map(|x| x.to_bits()).collect();
            if let Some(d) = t.diagnostics {
                b.extend([d.lambda0_hat, d.delta_pi_hat, d.beta_err].map(f64::to_bits));
            }
            (t.policy.clone(), t.repetition, b, t.actions.clone())
        })
        .collect()
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let cfg = small_config(all_policies(), 3);
    let (a, b) = (run_grid(&cfg, Some(2)).unwrap(), run_grid(&cfg, Some(2)).unwrap());
    assert!(a.is_complete());
    assert_eq!(a.traces.len(), 2 * 3 * 7);
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = small_config(all_policies(), 4);
    let one = run_grid(&cfg, Some(1)).unwrap();
    for k in [3, 8] {
        assert_eq!(bits(&one), bits(&run_grid(&cfg, Some(k)).unwrap()), "threads = {k}");
    }
}

#[test]
fn child_seeds_do_not_collide_over_a_million_cells() {
    let n_pol = 4;
    let cells = 1_000_000u64;
    for root in [0u64, 0x15d0_0002, u64::MAX] {
        let mut seen = HashSet::with_capacity((cells as usize) * (n_pol + 2));
        for c in 0..cells {
            let s = CellSeeds::new(root, c, n_pol);
            assert!(seen.insert(s.instance()));
            assert!(seen.insert(s.environment()));
            for k in 0..n_pol {
                assert!(seen.insert(s.policy(k)), "root {root} cell {c} policy {k}");
            }
        }
    }
    assert_ne!(child_seed(1, 0), child_seed(0, 0));
}

#[test]
fn cumulative_regret_is_a_bounded_running_sum() {
    let cfg = small_config(vec![PolicySpec::Uniform { label: None }, PolicySpec::Linucb { label: None }], 1);
    for seed in 0..5u64 {
        let ctx = prepare_cell(&cfg, None, seed).unwrap();
        for spec in &cfg.policies {
            let (mut policy, _) = build_policy(spec, &ctx, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = run_episode(ctx.environment.as_ref(), policy.as_mut(), ctx.horizon, &mut rng, None).unwrap();
            let mut total = 0.0;
            for (t, (&r, &c)) in out.instantaneous.iter().zip(&out.cumulative).enumerate() {
                total += r;
                assert!(r >= 0.0);
                assert_eq!(c, total);
                assert!(c <= 2.0 * ctx.ucb.l * ctx.ucb.m * (t + 1) as f64);
            }
        }
    }
}

#[test]
fn empty_horizon_gives_empty_trace() {
    let cfg = small_config(vec![PolicySpec::Linucb { label: None }], 1);
    let ctx = prepare_cell(&cfg, None, 1).unwrap();
    let (mut policy, _) = build_policy(&cfg.policies[0], &ctx, 1).unwrap();
    let out = run_episode(ctx.environment.as_ref(), policy.as_mut(), 0, &mut ChaCha8Rng::seed_from_u64(1), None).unwrap();
    assert!(out.instantaneous.is_empty() && out.cumulative.is_empty());
}

#[test]
fn greedy_oracle_has_zero_regret_without_noise() {
    let mut cfg = small_config(vec![PolicySpec::Oracle { label: None }], 3);
    cfg.instance.noise_sigma = 0.0;
    let r = run_grid(&cfg, None).unwrap();
    assert!(r.traces.iter().all(|t| t.instantaneous.iter().all(|&x| x == 0.0)));
}

#[test]
fn uniform_random_is_worst_on_benign_instances() {
    let mut policies = all_policies();
    policies.retain(|p| !matches!(p, PolicySpec::Isd { tier: OracleTier::None, .. }));
    let cfg = ExperimentConfig {
        name: "benign".into(),
        instance: InstanceConfig {
            p: 10,
            p_res: 2,
            n_actions: 5,
            t0: 2000,
            horizon: 100,
            noise_sigma: 0.1,
        },
        sweep: None,
        ..small_config(policies, 20)
    };
    let r = run_grid(&cfg, None).unwrap();
    let uniform = r.mean_final_regret("uniform", None).unwrap();
    for p in &cfg.policies {
        let label = p.label();
        let mean = r.mean_final_regret(&label, None).unwrap();
        assert!(uniform >= mean, "{label}: {mean} > uniform {uniform}");
    }
    let beaten = r
        .traces_for("uniform")
        .zip(r.traces_for("isd_oracle_subspaces"))
        .filter(|(u, i)| {
            assert_eq!(u.repetition, i.repetition);
            u.final_regret() > i.final_regret()
        })
        .count();
    assert_eq!(beaten, 20);
}

#[test]
fn export_round_trips_through_files() {
    let cfg = small_config(all_policies(), 2);
    let rows = records(&run_grid(&cfg, None).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let (csv_path, json_path) = (dir.path().join("r.csv"), dir.path().join("r.json"));
    export(&rows, &csv_path, Format::Csv).unwrap();
    export(&rows, &json_path, Format::Json).unwrap();
    let from_csv = read_csv(std::fs::File::open(&csv_path).unwrap()).unwrap();
    let from_json = read_json(std::fs::File::open(&json_path).unwrap()).unwrap();
    assert_eq!(from_csv, rows);
    assert_eq!(from_json, rows);
    assert_eq!(aggregate(&from_csv), aggregate(&rows));
    assert!(export(&rows, &dir.path().join("missing/x.csv"), Format::Csv).is_err());
}

#[test]
fn fig2_export_has_one_row_per_round() {
    let result = run_grid(&Figure::Fig2.config(), None).unwrap();
    assert_eq!(result.traces.len(), 80);
    let rows = records(&result);
    assert_eq!(rows.len(), 80 * 100);
    let mut buf = Vec::new();
    isd_linucb::harness::write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 80 * 100 + 1);
    assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
}

#[test]
fn summary_matches_recomputation_from_rows() {
    let rows = records(&run_grid(&small_config(all_policies(), 5), None).unwrap());
    for s in aggregate(&rows) {
        let v: Vec<f64> = rows
            .iter()
            .filter(|r| r.policy == s.policy && r.sweep_value == s.sweep_value && r.t == s.t)
            .map(|r| r.cum_regret)
            .collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        assert_eq!((s.n, s.mean, s.std), (v.len(), mean, var.sqrt()));
    }
}

fn cli(args: &[&str], envs: &[(&str, &str)]) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_isd-bandit"));
    cmd.args(args).env_remove(THREADS_ENV).env("RUST_LOG", "off");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write_config(dir: &Path, name: &str, cfg: &ExperimentConfig) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let good = write_config(dir.path(), "good.json", &small_config(all_policies(), 1));
    assert_eq!(cli(&["run", "--config", &good, "--out", out, "--reps", "2", "--seed", "7"], &[]).0, 0);
    let rows = read_csv(std::fs::File::open(dir.path().join("out/small.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 7 * 60);
    assert!(dir.path().join("out/small_summary.csv").exists());

    assert_eq!(cli(&["--format", "json", "run", "--config", &good, "--out", out], &[]).0, 0);
    let rows = read_json(std::fs::File::open(dir.path().join("out/small.json")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2 * 7 * 60);

    let mut bad = small_config(all_policies(), 1);
    bad.n_repetitions = 0;
    let bad = write_config(dir.path(), "bad.json", &bad);
    assert_eq!(cli(&["run", "--config", &bad, "--out", out], &[]).0, 1);
    std::fs::write(dir.path().join("broken.json"), "{").unwrap();
    let broken = dir.path().join("broken.json");
    assert_eq!(cli(&["run", "--config", broken.to_str().unwrap(), "--out", out], &[]).0, 1);
    assert_eq!(cli(&["run", "--config", "/nonexistent.json", "--out", out], &[]).0, 1);

    let mut partial = small_config(vec![PolicySpec::Linucb { label: None }, PolicySpec::isd(OracleTier::None)], 1);
    partial.instance.t0 = 20;
    partial.sweep = None;
    let partial = write_config(dir.path(), "partial.json", &partial);
    let (code, stderr) = cli(&["run", "--config", &partial, "--out", out], &[]);
    assert_eq!(code, 2, "{stderr}");
    let rows = read_csv(std::fs::File::open(dir.path().join("out/small.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.policy == "linucb"));
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &small_config(all_policies(), 1));
    let run = |sub: &str, envs: &[(&str, &str)]| {
        let out = dir.path().join(sub);
        let code = cli(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], envs).0;
        (code, std::fs::read(out.join("small.csv")).ok())
    };
    let (c1, a) = run("a", &[(THREADS_ENV, "1")]);
    let (c2, b) = run("b", &[(THREADS_ENV, "4")]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(run("c", &[(THREADS_ENV, "many")]).0, 1);
    let out = dir.path().join("d");
    let flag = cli(
        &["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--threads", "2"],
        &[(THREADS_ENV, "many")],
    );
    assert_eq!(flag.0, 0);
}

#[test]
fn reproduce_writes_figure_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(cli(&["reproduce", "fig2", "--out", out], &[]).0, 0);
    let rows = read_csv(std::fs::File::open(dir.path().join("fig2.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 80 * 100);
    assert!(rows.iter().all(|r| r.sweep_param.as_deref() == Some("p_res")));
    assert_eq!(cli(&["reproduce", "fig9", "--out", out], &[]).0, 1);
    assert_eq!(cli(&["--help"], &[]).0, 0);
}
