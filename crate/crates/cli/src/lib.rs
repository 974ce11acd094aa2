//! The `fairfront` command line: argument parsing and subcommand dispatch.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod timing;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::{Algorithm, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "fairfront", version, about = "Accuracy/fairness Pareto fronts")]
pub struct Cli {
    /// JSON run configuration; defaults apply to every missing key.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pareto front with the configured algorithm (PF-SMG by default).
    Front,
    /// Pareto front with the epsilon-constraint baseline.
    Epsfair,
    /// PF-SMG against the baseline on several seeded problems.
    Compare,
    /// Front snapshots over a stream of batches.
    Stream,
    /// Writes the synthetic dataset.
    Synth,
    /// Cleans and encodes the raw Adult files.
    PreprocessAdult {
        /// Directory holding adult.data and adult.test.
        #[arg(long)]
        input: PathBuf,
    },
    /// Filters and encodes the raw COMPAS file.
    PreprocessCompas {
        /// Path of compas-scores-two-years-violent.csv.
        #[arg(long)]
        input: PathBuf,
    },
    /// Purity, spreads and hypervolume of existing front files.
    Metrics {
        #[arg(long = "front", required = true, num_args = 1..)]
        fronts: Vec<PathBuf>,
        #[arg(long = "name")]
        names: Vec<String>,
        #[arg(long, default_value_t = 0.0)]
        purity_tolerance: f64,
        /// Hypervolume reference, comma separated.
        #[arg(long, value_delimiter = ',')]
        reference: Option<Vec<f64>>,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.unwrap_or(cfg.seed);
    cfg.apply_seed(seed);
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    Ok(cfg)
}

/// Sizes the global thread pool; returns the worker count in effect.
pub fn init_workers(workers: Option<usize>) -> Result<usize, CliError> {
    let n = match workers {
        Some(0) => return Err(CliError::Config("--workers must be >= 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
    {
        log::debug!("thread pool already initialized: {e}");
    }
    Ok(rayon::current_num_threads())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let workers = init_workers(cli.workers)?;
    let cfg = load_config(&cli)?;
    let ctx = Context {
        out: cfg.output.clone(),
        workers,
    };
    match &cli.command {
        Command::Front => commands::cmd_front(&cfg, cfg.algorithm, &ctx),
        Command::Epsfair => commands::cmd_front(&cfg, Algorithm::Epsfair, &ctx),
        Command::Compare => commands::cmd_compare(&cfg, &ctx),
        Command::Stream => commands::cmd_stream(&cfg, &ctx),
        Command::Synth => commands::cmd_synth(&cfg, &ctx),
        Command::PreprocessAdult { input } => commands::cmd_preprocess_adult(input, &ctx),
        Command::PreprocessCompas { input } => commands::cmd_preprocess_compas(input, &ctx),
        Command::Metrics {
            fronts,
            names,
            purity_tolerance,
            reference,
        } => commands::cmd_metrics(fronts, names, *purity_tolerance, reference.clone(), &ctx),
    }
}
