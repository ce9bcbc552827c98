//! Command-line front end: parses a run configuration, dispatches to the
//! numerical core and writes a JSON report plus optional CSV tables.

pub mod commands;
pub mod config;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

pub use commands::{execute, Outcome};
pub use config::{Command, RunConfig};
pub use report::{Check, RunReport, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config {}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Numerical(#[from] bcs_core::Error),
}

#[derive(Debug, Parser)]
#[command(name = "bcs", version, about = "BCS pairing diagnostics in the continuum")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the CSV table (or the report, for commands without one) here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `tol` from the configuration.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

/// Resolves the configuration against the command line.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(c) = cfg.command {
        if c != cli.command {
            return Err(CliError::Config(format!(
                "config is for `{}` but `{}` was requested",
                c.name(),
                cli.command.name()
            )));
        }
    }
    if cli.tol.is_some() {
        cfg.tol = cli.tol;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    Ok(cfg)
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.clone(), source })
}

/// Runs one command, writing the report to stdout. Returns whether every
/// enforced check passed.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = resolve(cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let start = Instant::now();
    let outcome = pool.install(|| execute(cli.command, &cfg))?;
    let json = outcome.report.to_json();
    if let Some(path) = &cfg.out {
        match &outcome.table {
            Some(table) => write_file(path, &table.to_csv())?,
            None => write_file(path, &json)?,
        }
    }
    std::io::stdout()
        .write_all(json.as_bytes())
        .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    for c in outcome.report.checks.iter().filter(|c| !c.pass) {
        let kind = if c.enforced { "FAIL" } else { "warning" };
        eprintln!("{kind}: {}: {}", c.name, c.detail);
    }
    eprintln!("{} finished in {:.2} s", cli.command.name(), start.elapsed().as_secs_f64());
    Ok(outcome.report.passed())
}
