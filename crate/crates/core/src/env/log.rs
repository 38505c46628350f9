use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::synthetic::{Round, SyntheticInstance};
use crate::error::{invalid, Error, Result};
use crate::linalg::min_eigenvalue;

/// `λ̂₀` at or below this value marks the log as rank-deficient.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineRecord {
    pub feature: DVector<f64>,
    /// 1-based action index.
    pub action: usize,
    pub reward: f64,
}

/// Offline observations in chronological order; record `i` is round `i − T₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineLog {
    records: Vec<OfflineRecord>,
    n_actions: usize,
    lambda0_hat: f64,
}

impl OfflineLog {
    pub fn new(records: Vec<OfflineRecord>, n_actions: usize) -> Result<Self> {
        let p = match records.first() {
            Some(r) => r.feature.len(),
            None => return invalid("offline log is empty"),
        };
        for r in &records {
            if r.feature.len() != p {
                return invalid("offline features have inconsistent dimension");
            }
            if r.action < 1 || r.action > n_actions {
                return invalid(format!("action {} outside 1..={n_actions}", r.action));
            }
        }
        let mut g = DMatrix::zeros(p, p);
        for r in &records {
            g.ger(1.0, &r.feature, &r.feature, 1.0);
        }
        g /= records.len() as f64;
        let lambda0_hat = min_eigenvalue(&g).max(0.0);
        Ok(Self {
            records,
            n_actions,
            lambda0_hat,
        })
    }

    pub fn records(&self) -> &[OfflineRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.records[0].feature.len()
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Smallest eigenvalue of `(1/T₀) Σ φφᵀ`.
    pub fn lambda0_hat(&self) -> f64 {
        self.lambda0_hat
    }

    pub fn is_rank_deficient(&self) -> bool {
        self.lambda0_hat <= RANK_TOL
    }

    pub fn features(&self) -> Vec<DVector<f64>> {
        self.records.iter().map(|r| r.feature.clone()).collect()
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.reward).collect()
    }

    pub fn max_feature_norm(&self) -> f64 {
        self.records.iter().map(|r| r.feature.norm()).fold(0.0, f64::max)
    }

    /// Columns `t, action, reward, f_1..f_p` with `t` running over `−T₀..=−1`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let p = self.dim();
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string(), "action".into(), "reward".into()];
        header.extend((1..=p).map(|i| format!("f_{i}")));
        w.write_record(&header)?;
        let t0 = self.len() as i64;
        for (i, r) in self.records.iter().enumerate() {
            let mut row = vec![(i as i64 - t0).to_string(), r.action.to_string(), format!("{:.16e}", r.reward)];
            row.extend(r.feature.iter().map(|x| format!("{x:.16e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, n_actions: usize) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(reader);
        let header = rd.headers()?.clone();
        let p = header.len().checked_sub(3).filter(|&p| p > 0).ok_or_else(|| {
            Error::InvalidInput("offline log CSV needs columns t, action, reward, f_1..f_p".into())
        })?;
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad number {s:?}: {e}")))
        };
        let mut records = Vec::new();
        for row in rd.records() {
            let row = row?;
            let action = row[1]
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidInput(format!("bad action {:?}: {e}", &row[1])))?;
            let reward = parse(&row[2])?;
            let feature = (0..p).map(|i| parse(&row[3 + i])).collect::<Result<Vec<f64>>>()?;
            records.push(OfflineRecord {
                feature: DVector::from_vec(feature),
                action,
                reward,
            });
        }
        Self::new(records, n_actions)
    }
}

/// Log `T₀` rounds of a uniformly random logging policy.
pub fn generate_offline_log<R: Rng + ?Sized>(instance: &SyntheticInstance, rng: &mut R) -> Result<OfflineLog> {
    let cfg = instance.config();
    let mut records = Vec::with_capacity(cfg.t0);
    for tau in 1..=cfg.t0 {
        let round = Round::Offline(tau);
        let mut cands = instance.features_at(round, rng)?;
        let a = rng.random_range(0..cfg.n_actions);
        let feature = cands.swap_remove(a);
        let reward = instance.reward(round, &feature, rng)?;
        records.push(OfflineRecord {
            feature,
            action: a + 1,
            reward,
        });
    }
    OfflineLog::new(records, cfg.n_actions)
}
