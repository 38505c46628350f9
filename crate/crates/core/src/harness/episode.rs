use nalgebra::DVector;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::policy::Policy;

/// Online-phase diagnostics of an ISD policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsdDiagnostics {
    pub lambda0_hat: f64,
    /// Distance between the estimated and true invariant subspaces.
    pub delta_pi_hat: f64,
    /// `‖β̂^inv − β^inv‖₂`.
    pub beta_err: f64,
    /// Offline invariant confidence event.
    pub coverage_inv: bool,
    /// Residual confidence event at the last round.
    pub coverage_res: bool,
}

/// Regret of one policy over one seeded episode.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub policy: String,
    pub repetition: usize,
    pub sweep_value: Option<f64>,
    pub instantaneous: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub actions: Vec<usize>,
    pub diagnostics: Option<IsdDiagnostics>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

/// Raw outcome of [`run_episode`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EpisodeOutcome {
    pub instantaneous: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub actions: Vec<usize>,
    /// Residual confidence event evaluated just before the last selection.
    pub coverage_res: Option<bool>,
}

/// Run rounds `1..=horizon`. Each round draws the candidates and then one
/// standard-normal noise variate before the policy acts, so policies driven by
/// equally seeded generators see identical contexts and noise.
///
/// `gamma` (the online parameter, if known) enables the residual coverage check
/// for ISD policies.
pub fn run_episode<E: Environment + ?Sized, P: Policy + ?Sized>(
    env: &E,
    policy: &mut P,
    horizon: usize,
    rng: &mut dyn RngCore,
    gamma: Option<&DVector<f64>>,
) -> Result<EpisodeOutcome> {
    let mut out = EpisodeOutcome {
        instantaneous: Vec::with_capacity(horizon),
        cumulative: Vec::with_capacity(horizon),
        actions: Vec::with_capacity(horizon),
        coverage_res: None,
    };
    let sigma = env.noise_sigma();
    let mut total = 0.0;
    for t in 1..=horizon {
        let step = |e: Error| round_error(t, e);
        let candidates = env.candidates(t, rng).map_err(step)?;
        let eps: f64 = rng.sample(StandardNormal);
        if t == horizon {
            if let (Some(isd), Some(g)) = (policy.as_isd(), gamma) {
                out.coverage_res = Some(isd.residual_error_norm(g) <= isd.rho_res().map_err(step)?);
            }
        }
        let a = policy.select_action(&candidates).map_err(step)?;
        let means = candidates
            .iter()
            .map(|c| env.mean_reward(t, c))
            .collect::<Result<Vec<f64>>>()
            .map_err(step)?;
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        policy.update(&candidates[a], means[a] + sigma * eps).map_err(step)?;
        let reg = (best - means[a]).max(0.0);
        total += reg;
        out.instantaneous.push(reg);
        out.cumulative.push(total);
        out.actions.push(a);
    }
    Ok(out)
}

fn round_error(round: usize, e: Error) -> Error {
    Error::Episode {
        round,
        policy: String::new(),
        seed: 0,
        source: Box::new(e),
    }
}

/// Fill in the policy label and seed of an episode error.
pub(crate) fn annotate(e: Error, policy: &str, seed: u64) -> Error {
    match e {
        Error::Episode { round, source, .. } => Error::Episode {
            round,
            policy: policy.to_string(),
            seed,
            source,
        },
        other => Error::Episode {
            round: 0,
            policy: policy.to_string(),
            seed,
            source: Box::new(other),
        },
    }
}
