use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use isd_linucb::harness::{
    aggregate, export, records, run_grid, write_summary_csv, ExperimentConfig, Figure, Format, GridResult,
    THREADS_ENV,
};
use isd_linucb::Error;

#[derive(Parser)]
#[command(name = "isd-bandit", version, about = "Regret experiments for ISD-linUCB and baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format of the per-round records.
    #[arg(long, value_enum, global = true, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a paper-figure preset.
    Reproduce {
        #[arg(value_enum)]
        figure: FigureArg,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, Error> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::Config(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn write_outputs(result: &GridResult, out: &Path, format: Format) -> Result<(), Error> {
    std::fs::create_dir_all(out)?;
    let rows = records(result);
    if rows.is_empty() {
        return Err(Error::InvalidInput("every cell failed; nothing to write".into()));
    }
    let path = out.join(format!("{}.{}", result.experiment, format.extension()));
    export(&rows, &path, format)?;
    let summary = out.join(format!("{}_summary.csv", result.experiment));
    write_summary_csv(&aggregate(&rows), std::fs::File::create(&summary)?)?;
    println!("wrote {} and {}", path.display(), summary.display());
    Ok(())
}

fn execute(cli: Cli) -> Result<GridResult, Error> {
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let (config, out, thr) = match cli.command {
        Command::Run {
            config,
            out,
            reps,
            seed,
            threads,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(r) = reps {
                cfg.n_repetitions = r;
            }
            if let Some(s) = seed {
                cfg.root_seed = s;
            }
            cfg.validate()?;
            (cfg, out, threads)
        }
        Command::Reproduce { figure, out, threads } => {
            let fig = match figure {
                FigureArg::Fig2 => Figure::Fig2,
                FigureArg::Fig3 => Figure::Fig3,
                FigureArg::Fig4 => Figure::Fig4,
                FigureArg::Fig5 => Figure::Fig5,
            };
            (fig.config(), out, threads)
        }
    };
    let result = run_grid(&config, threads(thr)?)?;
    write_outputs(&result, &out, format)?;
    Ok(result)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(r) if r.is_complete() => ExitCode::SUCCESS,
        Ok(r) => {
            eprintln!("{} cell(s) failed", r.failures.len());
            for f in &r.failures {
                eprintln!("  {} sweep={:?} rep={}: {}", f.policy, f.sweep_value, f.repetition, f.message);
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
