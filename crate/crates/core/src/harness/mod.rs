//! Seeded experiment orchestration, result export and figure presets.

mod config;
mod episode;
mod export;
mod figures;
mod grid;
pub mod seeds;

pub use config::{EnvironmentKind, ExperimentConfig, PolicySpec, Sweep, SweepParam};
pub use episode::{run_episode, EpisodeOutcome, IsdDiagnostics, RegretTrace};
pub use export::{
    aggregate, export, read_csv, read_json, records, write_csv, write_json, write_summary_csv, Format, Record,
    SummaryRow, COLUMNS,
};
pub use figures::Figure;
pub use grid::{build_policy, prepare_cell, run_grid, CellContext, CellFailure, GridResult};

/// Environment variable that sets the worker count when no explicit value is given.
pub const THREADS_ENV: &str = "ISD_BANDIT_THREADS";
