//! Thin command-line front end over [`isomonodromy::experiments`]. The
//! library and its examples are the primary interface; this binary only
//! parses flags, dispatches to `run_experiment`, and emits the report.
//! Exit code 0 means the report passed.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use isomonodromy::experiments::{
    emit_report, format_summary, run_experiment, ExperimentConfig, ReportFormat, EXPERIMENTS,
};

#[derive(Parser)]
#[command(name = "isomonodromy", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for the deterministic sampling stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled configurations.
    #[arg(long)]
    samples: Option<usize>,
    /// Relative tolerance for the ODE integrators.
    #[arg(long)]
    tol_ode: Option<f64>,
    /// Agreement threshold for algebraic round trips.
    #[arg(long)]
    tol_alg: Option<f64>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report encoding: json or csv-summary.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment suite and emit its report.
    Verify {
        /// One of: identities, isomonodromy, transversality,
        /// monodromy-invariants, riccati-geometry, rh-rank.
        experiment: String,
        #[command(flatten)]
        common: Common,
    },
    /// Shorthand for `verify isomonodromy`.
    Flow {
        #[command(flatten)]
        common: Common,
    },
    /// Shorthand for `verify riccati-geometry`.
    Fibers {
        #[command(flatten)]
        common: Common,
    },
    /// Shorthand for `verify rh-rank`.
    RhRank {
        #[command(flatten)]
        common: Common,
    },
    /// Run from a JSON config file mirroring ExperimentConfig.
    Report {
        /// Path to the JSON configuration.
        #[arg(long)]
        config: PathBuf,
        /// Report encoding: json or csv-summary.
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn apply(common: &Common, mut cfg: ExperimentConfig) -> ExperimentConfig {
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = common.samples {
        cfg.samples = samples;
    }
    if let Some(tol) = common.tol_ode {
        cfg.tol_ode = tol;
    }
    if let Some(tol) = common.tol_alg {
        cfg.tol_alg = tol;
    }
    cfg.out = common.out.clone();
    cfg
}

fn run(experiment: &str, common: &Common) -> Result<bool> {
    let format: ReportFormat = common.format.parse()?;
    let cfg = apply(common, ExperimentConfig::for_experiment(experiment));
    let report = run_experiment(&cfg)?;
    eprint!("{}", format_summary(&report));
    emit_report(&report, format)?;
    Ok(report.pass)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let pass = match &cli.command {
        Command::Verify { experiment, common } => {
            if !EXPERIMENTS.contains(&experiment.as_str()) {
                anyhow::bail!("unknown experiment {experiment:?}; expected one of {EXPERIMENTS:?}");
            }
            run(experiment, common)?
        }
        Command::Flow { common } => run("isomonodromy", common)?,
        Command::Fibers { common } => run("riccati-geometry", common)?,
        Command::RhRank { common } => run("rh-rank", common)?,
        Command::Report { config, format } => {
            let format: ReportFormat = format.parse()?;
            let text = std::fs::read_to_string(config)?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)?;
            let report = run_experiment(&cfg)?;
            eprint!("{}", format_summary(&report));
            emit_report(&report, format)?;
            report.pass
        }
    };
    if !pass {
        std::process::exit(1);
    }
    Ok(())
}
