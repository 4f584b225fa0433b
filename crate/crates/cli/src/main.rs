//! `oftrl`: configured runs, sweeps, the regret figure, block predictions
//! and verification suites for optimistic learning dynamics.

mod commands;
mod config;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oftrl_core::figure::{DEFAULT_DELTA, DEFAULT_ETA};
use oftrl_core::hardness::DEFAULT_C3;

use crate::config::RegularizerName;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config. Exit code 2.
    Usage(String),
    /// A run failed after its config was accepted. Exit code 1.
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "oftrl", version, about = "Optimistic learning dynamics in zero-sum matrix games")]
#[command(after_long_help = config::CONFIG_HELP)]
struct Cli {
    /// Experiment config (run, sweep).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory. Defaults to the current directory for run, sweep
    /// and figure1; verify and predict write files only when it is given.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for sweep and figure1.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Accepted for compatibility. Every computation is deterministic.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configured experiment.
    Run,
    /// Run the product of the `[sweep]` lists, one directory per run.
    Sweep,
    /// Average social dynamic regret panels on A_delta.
    Figure1 {
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: f64,
        /// Panel horizon override, e.g. `entropy=8000`. Repeatable. Panels:
        /// ogda, log_barrier, entropy, tsallis, sq_euclid.
        #[arg(long = "horizon", value_name = "NAME=N")]
        horizons: Vec<String>,
    },
    /// Predicted bad block of OFTRL on A_delta, optionally with detection.
    Predict {
        #[arg(long, value_enum, default_value = "entropy")]
        regularizer: RegularizerName,
        /// Tsallis exponent.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: f64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_C3)]
        c3: f64,
        /// Also run this many iterations and report detected landmarks.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Run a property suite: oracles, coincidence, lyapunov, reduction,
    /// lowerbound, bestiterate or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
}

fn require_config(config: Option<&Path>) -> Result<&Path, CliError> {
    config.ok_or_else(|| CliError::Usage("--config PATH is required".into()))
}

fn reject_config(config: Option<&Path>, command: &str) -> Result<(), CliError> {
    match config {
        Some(_) => Err(CliError::Usage(format!("{command} does not read --config"))),
        None => Ok(()),
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let config = cli.config.as_deref();
    let out = cli.out.as_deref();
    let out_or_cwd = out.unwrap_or(Path::new("."));
    match cli.command {
        Command::Run => commands::cmd_run(require_config(config)?, out_or_cwd)?,
        Command::Sweep => commands::cmd_sweep(require_config(config)?, out_or_cwd)?,
        Command::Figure1 { delta, eta, horizons } => {
            reject_config(config, "figure1")?;
            commands::cmd_figure1(delta, eta, &horizons, out_or_cwd)?
        }
        Command::Predict {
            regularizer,
            beta,
            eta,
            delta,
            c3,
            horizon,
        } => {
            reject_config(config, "predict")?;
            let args = commands::PredictArgs {
                regularizer: regularizer.with_beta(beta)?,
                eta,
                delta,
                c3,
                horizon,
            };
            commands::cmd_predict(&args, out)?
        }
        Command::Verify { suite } => {
            reject_config(config, "verify")?;
            return commands::cmd_verify(&suite, out);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
