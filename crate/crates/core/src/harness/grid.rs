use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{EnvironmentKind, ExperimentConfig, PolicySpec};
use super::episode::{annotate, run_episode, IsdDiagnostics, RegretTrace};
use super::seeds::CellSeeds;
use crate::env::{generate_offline_log, Environment, HypercubeInstance, OfflineLog, SyntheticInstance};
use crate::error::{Error, Result};
use crate::policy::{
    DiscountedLinUcb, GreedyOracle, IsdParams, IsdPolicy, LinUcb, Policy, SlidingWindowLinUcb, Truth, UcbParams,
    UniformRandom,
};
use crate::subspace::{principal_angle_distance, projection_distance};

/// A grid cell (or one policy of it) that could not be completed.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub policy: String,
    pub sweep_value: Option<f64>,
    pub repetition: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub experiment: String,
    pub sweep_param: Option<String>,
    pub traces: Vec<RegretTrace>,
    pub failures: Vec<CellFailure>,
}

impl GridResult {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn traces_for<'a>(&'a self, policy: &'a str) -> impl Iterator<Item = &'a RegretTrace> + 'a {
        self.traces.iter().filter(move |t| t.policy == policy)
    }

    /// Mean final cumulative regret of `policy` at a sweep value.
    pub fn mean_final_regret(&self, policy: &str, sweep_value: Option<f64>) -> Option<f64> {
        let v: Vec<f64> = self
            .traces_for(policy)
            .filter(|t| t.sweep_value == sweep_value)
            .map(RegretTrace::final_regret)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Everything one episode needs besides the policy.
pub struct CellContext {
    pub environment: Box<dyn Environment + Send + Sync>,
    pub horizon: usize,
    pub ucb: UcbParams,
    /// Online parameter, for oracle policies and coverage checks.
    pub gamma: DVector<f64>,
    pub synthetic: Option<(SyntheticInstance, OfflineLog)>,
}

/// Sample the instance (and offline log) for one cell and fix `L`, `M`.
pub fn prepare_cell(config: &ExperimentConfig, sweep_value: Option<f64>, seed: u64) -> Result<CellContext> {
    let inst_cfg = config.instance_at(sweep_value)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = config.eta_for(inst_cfg.horizon);
    match config.environment {
        EnvironmentKind::Synthetic => {
            let mut inst = SyntheticInstance::sample(inst_cfg, &mut rng)?;
            let log = generate_offline_log(&inst, &mut rng)?;
            let l = log.max_feature_norm() * 1.05;
            inst.set_feature_bound(l)?;
            let ucb = UcbParams {
                lambda: config.lambda,
                eta,
                sigma: inst.noise_sigma(),
                l,
                m: inst.param_bound(),
            };
            let gamma = inst.gamma(crate::env::Round::Online(1))?;
            Ok(CellContext {
                environment: Box::new(inst.clone()),
                horizon: inst_cfg.horizon,
                ucb,
                gamma,
                synthetic: Some((inst, log)),
            })
        }
        EnvironmentKind::Hypercube => {
            let h = HypercubeInstance::sample(inst_cfg.p, inst_cfg.horizon, &mut rng)?;
            let ucb = UcbParams {
                lambda: config.lambda,
                eta,
                sigma: 1.0,
                l: h.feature_bound(),
                m: h.gamma().norm(),
            };
            Ok(CellContext {
                gamma: h.gamma().clone(),
                environment: Box::new(h),
                horizon: inst_cfg.horizon,
                ucb,
                synthetic: None,
            })
        }
    }
}

/// Construct a policy for a prepared cell. ISD policies also return their
/// offline diagnostics (without the residual coverage event).
pub fn build_policy(
    spec: &PolicySpec,
    ctx: &CellContext,
    seed: u64,
) -> Result<(Box<dyn Policy>, Option<IsdDiagnostics>)> {
    let p = ctx.environment.dim();
    let ucb = ctx.ucb;
    Ok(match spec {
        PolicySpec::Linucb { .. } => (Box::new(LinUcb::new(p, ucb)?), None),
        PolicySpec::SwLinucb { window, .. } => {
            (Box::new(SlidingWindowLinUcb::new(p, window.unwrap_or(ctx.horizon), ucb)?), None)
        }
        PolicySpec::DLinucb { discount, .. } => (Box::new(DiscountedLinUcb::new(p, *discount, ucb)?), None),
        PolicySpec::Uniform { .. } => (Box::new(UniformRandom::new(seed)), None),
        PolicySpec::Oracle { .. } => (Box::new(GreedyOracle::new(ctx.gamma.clone())), None),
        PolicySpec::Isd {
            tier,
            radius_mode,
            delta_pi_c,
            decomposition,
            recompute,
            freeze_basis,
            ..
        } => {
            let (inst, log) = ctx
                .synthetic
                .as_ref()
                .ok_or_else(|| Error::Config("ISD policies need the synthetic environment".into()))?;
            let params = IsdParams {
                ucb,
                tier: *tier,
                radius_mode: *radius_mode,
                delta_pi_c: *delta_pi_c,
                decomposition: *decomposition,
                recompute: *recompute,
                freeze_basis: *freeze_basis,
            };
            let truth = (*tier != crate::policy::OracleTier::None).then(|| Truth {
                basis: inst.basis().clone(),
                beta_inv: inst.beta_inv().clone(),
            });
            let policy = IsdPolicy::fit_offline(log, params, truth, seed)?;
            let diag = isd_diagnostics(&policy, inst, log)?;
            (Box::new(policy), Some(diag))
        }
    })
}

fn isd_diagnostics(policy: &IsdPolicy, inst: &SyntheticInstance, log: &OfflineLog) -> Result<IsdDiagnostics> {
    let (truth, est) = (inst.basis().u_inv(), policy.basis().u_inv());
    let delta_pi_hat = if truth.ncols() == est.ncols() {
        principal_angle_distance(truth, est)?
    } else {
        projection_distance(truth, est)?
    };
    Ok(IsdDiagnostics {
        lambda0_hat: log.lambda0_hat(),
        delta_pi_hat,
        beta_err: (policy.beta_hat() - inst.beta_inv()).norm(),
        coverage_inv: policy.invariant_error_norm(inst.beta_inv()) <= policy.rho_inv(),
        coverage_res: false,
    })
}

struct Cell {
    sweep_index: usize,
    sweep_value: Option<f64>,
    repetition: usize,
}

fn run_cell(config: &ExperimentConfig, cell: &Cell) -> Vec<std::result::Result<RegretTrace, CellFailure>> {
    let n_pol = config.policies.len();
    let reps = config.n_repetitions;
    let first = if config.paired_sweep { 0 } else { cell.sweep_index * reps };
    let seeds = CellSeeds::new(config.root_seed, (first + cell.repetition) as u64, n_pol);
    let instance_seeds = if config.fixed_instance {
        CellSeeds::new(config.root_seed, first as u64, n_pol)
    } else {
        seeds
    };
    let fail = |policy: String, e: &Error| CellFailure {
        policy,
        sweep_value: cell.sweep_value,
        repetition: cell.repetition,
        message: e.to_string(),
    };
    let ctx = match prepare_cell(config, cell.sweep_value, instance_seeds.instance()) {
        Ok(c) => c,
        Err(e) => return config.policies.iter().map(|p| Err(fail(p.label(), &e))).collect(),
    };
    config
        .policies
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let label = spec.label();
            let seed = seeds.policy(k);
            let run = || -> Result<RegretTrace> {
                let (mut policy, mut diag) = build_policy(spec, &ctx, seed)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seeds.environment());
                let out = run_episode(ctx.environment.as_ref(), policy.as_mut(), ctx.horizon, &mut rng, Some(&ctx.gamma))?;
                if let Some(d) = diag.as_mut() {
                    d.coverage_res = out.coverage_res.unwrap_or(true);
                }
                Ok(RegretTrace {
                    policy: label.clone(),
                    repetition: cell.repetition,
                    sweep_value: cell.sweep_value,
                    instantaneous: out.instantaneous,
                    cumulative: out.cumulative,
                    actions: out.actions,
                    diagnostics: diag,
                })
            };
            run().map_err(|e| fail(label.clone(), &annotate(e, &label, seed)))
        })
        .collect()
}

/// Run every (sweep value × repetition × policy) cell, `threads` cells at a
/// time (`None`: rayon's default). Failed cells are recorded and skipped.
pub fn run_grid(config: &ExperimentConfig, threads: Option<usize>) -> Result<GridResult> {
    config.validate()?;
    let cells: Vec<Cell> = config
        .sweep_values()
        .into_iter()
        .enumerate()
        .flat_map(|(i, v)| {
            (0..config.n_repetitions).map(move |r| Cell {
                sweep_index: i,
                sweep_value: v,
                repetition: r,
            })
        })
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| cells.par_iter().map(|c| run_cell(config, c)).collect());

    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for r in outcomes.into_iter().flatten() {
        match r {
            Ok(t) => traces.push(t),
            Err(f) => {
                log::warn!("cell failed: {} (rep {}): {}", f.policy, f.repetition, f.message);
                failures.push(f)
            }
        }
    }
    Ok(GridResult {
        experiment: config.name.clone(),
        sweep_param: config.sweep.as_ref().map(|s| s.param.name().to_string()),
        traces,
        failures,
    })
}
