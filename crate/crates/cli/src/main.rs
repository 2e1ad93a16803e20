//! `entroloss`: compute quantities, run sequence families and claim suites
//! from a TOML run file, and write JSON/CSV artifacts.
//!
//! Exit status is 0 on success, 1 when a suite check fails (its reports are
//! still written) and 2 for configuration, input or missing-artifact errors.

mod commands;
mod config;
mod output;
mod quantity;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("missing artifacts: {0}")]
    MissingArtifacts(String),
    #[error("{0}")]
    Compute(#[from] entroloss_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} suite(s) failed")]
    SuiteFailure(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::SuiteFailure(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "entroloss", version, about = "Entropy-loss estimates along converging state sequences")]
struct Cli {
    /// Subcommand; may instead be given as `command = "..."` in the config.
    #[command(subcommand)]
    command: Option<Sub>,
    /// TOML run file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for optimizers and randomized suite instances.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Evaluate one quantity on the configured state or channel.
    Quantity,
    /// Evaluate functionals along a built-in sequence family.
    Sequence,
    /// Run claim suites and write their reports.
    Suite,
    /// Summarize suite reports found in a directory.
    Report,
    /// List built-in families, suites and quantity names.
    List,
}

/// Settings shared by every command after merging flags over the config.
#[derive(Debug, Clone)]
pub struct Globals {
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("ENTROLOSS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("ENTROLOSS_THREADS=`{v}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = match &cli.config {
        Some(p) => config::load(p)?,
        None => config::RunConfig::default(),
    };
    let sub = match (cli.command, cfg.command) {
        (Some(Sub::List), _) => return commands::list(),
        (Some(s), c) => {
            let s = match s {
                Sub::Quantity => Command::Quantity,
                Sub::Sequence => Command::Sequence,
                Sub::Suite => Command::Suite,
                Sub::Report => Command::Report,
                Sub::List => unreachable!(),
            };
            if let Some(c) = c.filter(|&c| c != s) {
                return Err(CliError::Config(format!("config says `command = \"{c}\"` but `{s}` was requested")));
            }
            s
        }
        (None, Some(c)) => c,
        (None, None) => {
            return Err(CliError::Config(
                "no command: pass one of quantity|sequence|suite|report or set `command` in the config".into(),
            ))
        }
    };
    let out_cfg = cfg.output.as_ref();
    let g = Globals {
        seed: cli.seed.or(cfg.seed.map(|s| s.0)).unwrap_or(0),
        out: cli
            .out
            .or_else(|| out_cfg.and_then(|o| o.dir.as_ref()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("entroloss-out")),
        format: cli.format.or(out_cfg.and_then(|o| o.format)).unwrap_or_default(),
    };
    match sub {
        Command::Quantity => commands::quantity(&cfg, &g),
        Command::Sequence => commands::sequence(&cfg, &g),
        Command::Suite => commands::suite(&cfg, &g),
        Command::Report => commands::report(&cfg, &g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("entroloss: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
