//! Experiment presets matching the paper's figures.

use std::str::FromStr;

use super::config::{EnvironmentKind, ExperimentConfig, PolicySpec, Sweep, SweepParam};
use crate::env::{InstanceConfig, DEFAULT_NOISE_SIGMA};
use crate::error::Error;
use crate::policy::OracleTier;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Oracle-subspace ISD for `p = 10`, `p_res ∈ {2, 4, 6, 8}`.
    Fig2,
    /// LinUCB vs oracle-subspace ISD (plus SW/D baselines) for `p ∈ 3..=10`.
    Fig3,
    /// All tiers for `T₀ ∈ {1000, 3500, 8000}`.
    Fig4,
    /// Projection error of the estimated decomposition.
    Fig5,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            _ => Err(Error::Config(format!("unknown figure {s:?}"))),
        }
    }
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }

    pub fn config(self) -> ExperimentConfig {
        let oracle_t0 = InstanceConfig {
            p: 10,
            p_res: 2,
            n_actions: 5,
            t0: 2000,
            horizon: 100,
            noise_sigma: DEFAULT_NOISE_SIGMA,
        };
        let estimated_t0 = InstanceConfig {
            p_res: 3,
            t0: 1000,
            horizon: 500,
            ..oracle_t0
        };
        let t0_sweep = Some(Sweep {
            param: SweepParam::T0,
            values: vec![1000.0, 3500.0, 8000.0],
        });
        let (instance, policies, sweep) = match self {
            Figure::Fig2 => (
                oracle_t0,
                vec![PolicySpec::isd(OracleTier::Subspaces)],
                Some(Sweep {
                    param: SweepParam::PRes,
                    values: vec![2.0, 4.0, 6.0, 8.0],
                }),
            ),
            Figure::Fig3 => (
                oracle_t0,
                vec![
                    PolicySpec::Linucb { label: None },
                    PolicySpec::isd(OracleTier::Subspaces),
                    PolicySpec::SwLinucb {
                        label: None,
                        window: None,
                    },
                    PolicySpec::DLinucb {
                        label: None,
                        discount: 0.999,
                    },
                ],
                Some(Sweep {
                    param: SweepParam::P,
                    values: (3..=10).map(f64::from).collect(),
                }),
            ),
            Figure::Fig4 => (
                estimated_t0,
                vec![
                    PolicySpec::Linucb { label: None },
                    PolicySpec::isd(OracleTier::SubspacesAndBeta),
                    PolicySpec::isd(OracleTier::Subspaces),
                    PolicySpec::isd(OracleTier::None),
                ],
                t0_sweep,
            ),
            Figure::Fig5 => (estimated_t0, vec![PolicySpec::isd(OracleTier::None)], t0_sweep),
        };
        ExperimentConfig {
            name: self.name().to_string(),
            environment: EnvironmentKind::Synthetic,
            instance,
            policies,
            sweep,
            n_repetitions: 20,
            root_seed: 0x15d0_0000 + self as u64,
            lambda: 0.1,
            eta: None,
            fixed_instance: false,
            paired_sweep: matches!(self, Figure::Fig4 | Figure::Fig5),
        }
    }
}
