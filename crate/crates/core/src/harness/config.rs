use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::InstanceConfig;
use crate::error::{Error, Result};
use crate::policy::{OracleTier, RadiusMode};
use crate::subspace::DecompositionOptions;

fn default_lambda() -> f64 {
    0.1
}

fn default_reps() -> usize {
    20
}

fn default_c() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    #[default]
    Synthetic,
    Hypercube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    P,
    PRes,
    T0,
    Horizon,
    NoiseSigma,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::P => "p",
            SweepParam::PRes => "p_res",
            SweepParam::T0 => "t0",
            SweepParam::Horizon => "horizon",
            SweepParam::NoiseSigma => "noise_sigma",
        }
    }

    /// Instance configuration with this parameter set to `value`.
    pub fn apply(self, base: &InstanceConfig, value: f64) -> Result<InstanceConfig> {
        let mut c = *base;
        let as_count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v < 1e12 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!("sweep value {v} for {} is not a count", self.name())))
            }
        };
        match self {
            SweepParam::P => c.p = as_count(value)?,
            SweepParam::PRes => c.p_res = as_count(value)?,
            SweepParam::T0 => c.t0 = as_count(value)?,
            SweepParam::Horizon => c.horizon = as_count(value)?,
            SweepParam::NoiseSigma => c.noise_sigma = value,
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// One policy of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    Linucb {
        #[serde(default)]
        label: Option<String>,
    },
    SwLinucb {
        #[serde(default)]
        label: Option<String>,
        /// Defaults to the horizon.
        #[serde(default)]
        window: Option<usize>,
    },
    DLinucb {
        #[serde(default)]
        label: Option<String>,
        discount: f64,
    },
    Uniform {
        #[serde(default)]
        label: Option<String>,
    },
    /// Greedy with exact knowledge of the online parameter.
    Oracle {
        #[serde(default)]
        label: Option<String>,
    },
    Isd {
        #[serde(default)]
        label: Option<String>,
        tier: OracleTier,
        #[serde(default)]
        radius_mode: RadiusMode,
        #[serde(default = "default_c")]
        delta_pi_c: f64,
        #[serde(default)]
        decomposition: DecompositionOptions,
        #[serde(default)]
        recompute: bool,
        #[serde(default)]
        freeze_basis: bool,
    },
}

impl PolicySpec {
    pub fn isd(tier: OracleTier) -> Self {
        PolicySpec::Isd {
            label: None,
            tier,
            radius_mode: RadiusMode::default(),
            delta_pi_c: 1.0,
            decomposition: DecompositionOptions::default(),
            recompute: false,
            freeze_basis: false,
        }
    }

    pub fn label(&self) -> String {
        let (custom, default) = match self {
            PolicySpec::Linucb { label } => (label, "linucb"),
            PolicySpec::SwLinucb { label, .. } => (label, "sw_linucb"),
            PolicySpec::DLinucb { label, .. } => (label, "d_linucb"),
            PolicySpec::Uniform { label } => (label, "uniform"),
            PolicySpec::Oracle { label } => (label, "oracle"),
            PolicySpec::Isd { label, tier, .. } => (
                label,
                match tier {
                    OracleTier::SubspacesAndBeta => "isd_oracle_beta",
                    OracleTier::Subspaces => "isd_oracle_subspaces",
                    OracleTier::None => "isd_estimated",
                },
            ),
        };
        custom.clone().unwrap_or_else(|| default.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub environment: EnvironmentKind,
    pub instance: InstanceConfig,
    pub policies: Vec<PolicySpec>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_reps")]
    pub n_repetitions: usize,
    #[serde(default)]
    pub root_seed: u64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Defaults to `1/T`.
    #[serde(default)]
    pub eta: Option<f64>,
    /// Reuse one instance for every repetition of a sweep value.
    #[serde(default)]
    pub fixed_instance: bool,
    /// Give repetition `r` the same seeds at every sweep value.
    #[serde(default)]
    pub paired_sweep: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn sweep_values(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.values.iter().copied().map(Some).collect(),
            None => vec![None],
        }
    }

    /// Instance configuration at a sweep value.
    pub fn instance_at(&self, value: Option<f64>) -> Result<InstanceConfig> {
        match (&self.sweep, value) {
            (Some(s), Some(v)) => s.param.apply(&self.instance, v),
            _ => Ok(self.instance),
        }
    }

    pub fn eta_for(&self, horizon: usize) -> f64 {
        self.eta.unwrap_or(1.0 / horizon as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.n_repetitions == 0 {
            return cfg("n_repetitions must be >= 1".into());
        }
        if self.policies.is_empty() {
            return cfg("at least one policy is required".into());
        }
        if !(self.lambda > 0.0) {
            return cfg(format!("lambda must be positive, got {}", self.lambda));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return cfg("sweep has no values".into());
            }
        }
        let mut labels: Vec<String> = self.policies.iter().map(PolicySpec::label).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != self.policies.len() {
            return cfg("policy labels must be unique".into());
        }
        for v in self.sweep_values() {
            let inst = self.instance_at(v)?;
            if self.environment == EnvironmentKind::Synthetic {
                inst.validate().map_err(|e| Error::Config(e.to_string()))?;
            } else if inst.p == 0 || inst.horizon == 0 {
                return cfg("hypercube needs p >= 1 and horizon >= 1".into());
            }
            let eta = self.eta_for(inst.horizon);
            if !(eta > 0.0 && eta < 1.0) {
                return cfg(format!("eta must lie in (0, 1), got {eta}"));
            }
        }
        for p in &self.policies {
            match p {
                PolicySpec::DLinucb { discount, .. } if !(*discount > 0.0 && *discount < 1.0) => {
                    return cfg(format!("discount must lie in (0, 1), got {discount}"));
                }
                PolicySpec::SwLinucb { window: Some(0), .. } => return cfg("window must be >= 1".into()),
                PolicySpec::Isd { .. } if self.environment == EnvironmentKind::Hypercube => {
                    return cfg("ISD policies need the synthetic environment".into());
                }
                _ => {}
            }
        }
        Ok(())
    }
}
