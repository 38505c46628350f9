use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::GridResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub const COLUMNS: [&str; 12] = [
    "experiment",
    "policy",
    "sweep_param",
    "sweep_value",
    "repetition",
    "t",
    "inst_regret",
    "cum_regret",
    "lambda0_hat",
    "delta_pi_hat",
    "beta_err",
    "coverage",
];

/// One exported row: a single round of a single trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub policy: String,
    pub sweep_param: Option<String>,
    pub sweep_value: Option<f64>,
    pub repetition: usize,
    pub t: usize,
    pub inst_regret: f64,
    pub cum_regret: f64,
    pub lambda0_hat: Option<f64>,
    pub delta_pi_hat: Option<f64>,
    pub beta_err: Option<f64>,
    pub coverage: Option<bool>,
}

/// Flatten a grid result into rows ordered by trace, then round.
pub fn records(result: &GridResult) -> Vec<Record> {
    let mut out = Vec::new();
    for tr in &result.traces {
        let d = tr.diagnostics;
        for (i, (&inst, &cum)) in tr.instantaneous.iter().zip(&tr.cumulative).enumerate() {
            out.push(Record {
                experiment: result.experiment.clone(),
                policy: tr.policy.clone(),
                sweep_param: result.sweep_param.clone(),
                sweep_value: tr.sweep_value,
                repetition: tr.repetition,
                t: i + 1,
                inst_regret: inst,
                cum_regret: cum,
                lambda0_hat: d.map(|d| d.lambda0_hat),
                delta_pi_hat: d.map(|d| d.delta_pi_hat),
                beta_err: d.map(|d| d.beta_err),
                coverage: d.map(|d| d.coverage_inv && d.coverage_res),
            });
        }
    }
    out
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[Record], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.policy.clone(),
            r.sweep_param.clone().unwrap_or_default(),
            fmt_opt(r.sweep_value),
            r.repetition.to_string(),
            r.t.to_string(),
            fmt_float(r.inst_regret),
            fmt_float(r.cum_regret),
            fmt_opt(r.lambda0_hat),
            fmt_opt(r.delta_pi_hat),
            fmt_opt(r.beta_err),
            r.coverage.map(|c| if c { "1" } else { "0" }.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<Record>> {
    let mut rd = csv::Reader::from_reader(reader);
    let header = rd.headers()?.clone();
    for col in COLUMNS {
        if !header.iter().any(|h| h == col) {
            return Err(Error::InvalidInput(format!("missing column {col:?}")));
        }
    }
    let idx = |name: &str| header.iter().position(|h| h == name).expect("checked above");
    let cols: Vec<usize> = COLUMNS.iter().map(|c| idx(c)).collect();
    let bad = |what: &str, s: &str| Error::InvalidInput(format!("bad {what} value {s:?}"));
    let float = |s: &str| s.parse::<f64>().map_err(|_| bad("float", s));
    let opt_float = |s: &str| if s.is_empty() { Ok(None) } else { float(s).map(Some) };
    let count = |s: &str| s.parse::<usize>().map_err(|_| bad("integer", s));
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let f = |i: usize| &row[cols[i]];
        out.push(Record {
            experiment: f(0).to_string(),
            policy: f(1).to_string(),
            sweep_param: (!f(2).is_empty()).then(|| f(2).to_string()),
            sweep_value: opt_float(f(3))?,
            repetition: count(f(4))?,
            t: count(f(5))?,
            inst_regret: float(f(6))?,
            cum_regret: float(f(7))?,
            lambda0_hat: opt_float(f(8))?,
            delta_pi_hat: opt_float(f(9))?,
            beta_err: opt_float(f(10))?,
            coverage: match f(11) {
                "" => None,
                "1" => Some(true),
                "0" => Some(false),
                s => return Err(bad("coverage", s)),
            },
        });
    }
    Ok(out)
}

pub fn write_json<W: Write>(rows: &[Record], writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, rows)?;
    Ok(())
}

pub fn read_json<R: Read>(reader: R) -> Result<Vec<Record>> {
    Ok(serde_json::from_reader(reader)?)
}

/// Write rows to `path` in the given format.
pub fn export(rows: &[Record], path: &Path, format: Format) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidInput("nothing to export".into()));
    }
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        Format::Csv => write_csv(rows, file),
        Format::Json => write_json(rows, file),
    }
}

/// Mean and sample standard deviation of cumulative regret per (policy, sweep value, round).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub policy: String,
    pub sweep_param: Option<String>,
    pub sweep_value: Option<f64>,
    pub t: usize,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

/// Groups appear in first-occurrence order; sums run in row order.
pub fn aggregate(rows: &[Record]) -> Vec<SummaryRow> {
    let mut index: HashMap<(&str, &str, Option<u64>, usize), usize> = HashMap::new();
    let mut groups: Vec<(&Record, Vec<f64>)> = Vec::new();
    for r in rows {
        let key = (r.experiment.as_str(), r.policy.as_str(), r.sweep_value.map(f64::to_bits), r.t);
        let i = *index.entry(key).or_insert_with(|| {
            groups.push((r, Vec::new()));
            groups.len() - 1
        });
        groups[i].1.push(r.cum_regret);
    }
    groups
        .into_iter()
        .map(|(r, v)| {
            let n = v.len();
            let mean = v.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                experiment: r.experiment.clone(),
                policy: r.policy.clone(),
                sweep_param: r.sweep_param.clone(),
                sweep_value: r.sweep_value,
                t: r.t,
                n,
                mean,
                std,
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["experiment", "policy", "sweep_param", "sweep_value", "t", "n", "mean", "std"])?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.policy.clone(),
            r.sweep_param.clone().unwrap_or_default(),
            fmt_opt(r.sweep_value),
            r.t.to_string(),
            r.n.to_string(),
            fmt_float(r.mean),
            fmt_float(r.std),
        ])?;
    }
    w.flush()?;
    Ok(())
}
