//! `bnweights`: learn an ensemble of Bayesian networks, derive dimension
//! weights and compare group rankings under rival weighting schemes.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use bnweights::learners::AlgorithmId;
use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(bnweights::Error),
    Io(std::io::Error),
}

impl From<bnweights::Error> for CliError {
    fn from(e: bnweights::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_data_error() => 2,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "writing outputs: {e}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bnweights", version, about = "Bayesian-network weights for composite indexes")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed; every randomized step derives its own seed from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated weighting schemes (bn, equal or eq, spearman, ols, rf, external).
    #[arg(long, global = true, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Consensus threshold of the robust network, in (0, 11].
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Bootstrap replicates for arc strengths.
    #[arg(long, global = true)]
    bootstrap: Option<usize>,
    /// Path-length treatment of BN weights: literal or dwi.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Per-arc discount of the dwi mode, in (0, 1].
    #[arg(long, global = true)]
    discount: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the learner suite and write manifests, graphs, the consensus table and the robust network.
    Learn {
        /// Run a single algorithm instead of the suite.
        #[arg(long)]
        algorithm: Option<AlgorithmId>,
    },
    /// Bootstrap arc strengths of the robust network.
    Strength,
    /// Compute the weight table for the requested schemes.
    Weights,
    /// Rank groups under each scheme and report rank shifts against equal weights.
    Compare,
    /// Forward-sample a dataset from a network file.
    Simulate {
        #[arg(long)]
        bn: PathBuf,
        #[arg(long)]
        n: usize,
        /// Where to write the sampled schema.
        #[arg(long)]
        schema_out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        schemes: cli.schemes.clone(),
        threshold: cli.threshold,
        bootstrap: cli.bootstrap,
        mode: cli.mode.clone(),
        discount: cli.discount,
    };
    let outputs = match &cli.command {
        Command::Simulate { bn, n, schema_out } => {
            let out = cli
                .out
                .as_deref()
                .ok_or_else(|| CliError::Usage("simulate needs --out FILE".into()))?;
            commands::simulate_cmd(bn, *n, cli.seed.unwrap_or(0), out, schema_out.as_deref())?
        }
        cmd => {
            let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
            match cmd {
                Command::Learn { algorithm } => commands::learn_cmd(&cfg, *algorithm)?,
                Command::Strength => commands::strength_cmd(&cfg)?,
                Command::Weights => commands::weights_cmd(&cfg)?,
                Command::Compare => commands::compare_cmd(&cfg)?,
                Command::Simulate { .. } => unreachable!(),
            }
        }
    };
    for p in outputs.paths() {
        log::info!("writing {}", p.display());
    }
    outputs.commit().map_err(CliError::Io)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bnweights: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
