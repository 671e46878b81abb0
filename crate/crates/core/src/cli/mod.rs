//! Command-line front end. Exit codes: 0 when every gating check holds, 2
//! when a check is violated, full disclosure is beaten, a regime map
//! disagrees with the checkers or a verdict file fails re-verification, and
//! 1 on errors.

mod commands;
mod config;
mod output;
mod records;

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_check, cmd_oracle, cmd_regime_map, cmd_verify, compute_checks, compute_oracle, compute_regime_map,
    validate_regime_point, verify_records, OracleRun, Sink, VerifyReport, EXIT_ERROR, EXIT_FLAGGED, EXIT_OK,
};
pub use config::{
    parse_grid, regime_only_config, CheckName, DomainsConfig, Format, GridConfig, ModelConfig, OracleConfig,
    OutputConfig, PriorConfig, RegimeMapConfig, RunConfig, DEFAULT_LINE_RESOLUTION, DEFAULT_PI_GRID,
};
pub use output::{fmt_f64, header_comment, VERSION};
pub use records::{values_match, CheckRecord, Header, OracleRecord, Record, RegimeRecord};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "disclosure", version, about = "Checks when full disclosure is optimal for a sender")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured condition checks on a grid.
    Check(CommonArgs),
    /// Run the pooling and concavification oracles on the prior.
    Oracle(CommonArgs),
    /// Classify a (gamma, rho) lattice and cross-check a subsample.
    RegimeMap(CommonArgs),
    /// Recompute every record of a verdict file and compare.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Configuration file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid resolution as NxM (states x actions).
    #[arg(long)]
    pub grid: Option<String>,
    /// Seed for randomized subsampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output formats; overrides `output.formats`.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Suppress the summary on stdout.
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Verdict file; defaults to `<out>/verdicts.jsonl`.
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Configuration the file is expected to come from.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Grid override used for the original run, to reproduce its hash.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub quiet: bool,
}

/// Loads the configuration and applies command-line overrides.
pub fn resolve_config(args: &CommonArgs, require_file: bool) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None if require_file => return Err(Error::Config("--config is required".into())),
        None => regime_only_config(),
    };
    apply_overrides(&mut cfg, args.grid.as_deref(), args.seed)?;
    if let Some(out) = &args.out {
        cfg.output.dir = out.display().to_string();
    }
    if !args.format.is_empty() {
        cfg.output.formats = args.format.clone();
    }
    Ok(cfg)
}

fn apply_overrides(cfg: &mut RunConfig, grid: Option<&str>, seed: Option<u64>) -> Result<()> {
    if let Some(g) = grid {
        let (n, m) = parse_grid(g)?;
        cfg.grid.states = n;
        cfg.grid.actions = m;
    }
    if seed.is_some() {
        cfg.seed = seed;
    }
    Ok(())
}

fn sink_for(cfg: &RunConfig, quiet: bool) -> Sink {
    Sink {
        dir: PathBuf::from(&cfg.output.dir),
        formats: cfg.output.formats.iter().copied().collect::<BTreeSet<_>>(),
        quiet,
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Check(a) => {
            let cfg = resolve_config(&a, true)?;
            cmd_check(&cfg, &sink_for(&cfg, a.quiet))
        }
        Command::Oracle(a) => {
            let cfg = resolve_config(&a, true)?;
            cmd_oracle(&cfg, &sink_for(&cfg, a.quiet))
        }
        Command::RegimeMap(a) => {
            let cfg = resolve_config(&a, false)?;
            cmd_regime_map(&cfg, &sink_for(&cfg, a.quiet))
        }
        Command::Verify(a) => {
            let file = match (&a.file, &a.out) {
                (Some(f), _) => f.clone(),
                (None, Some(dir)) => dir.join("verdicts.jsonl"),
                (None, None) => PathBuf::from(OutputConfig::default().dir).join("verdicts.jsonl"),
            };
            let expected = match &a.config {
                Some(path) => {
                    let mut cfg = RunConfig::load(path)?;
                    apply_overrides(&mut cfg, a.grid.as_deref(), a.seed)?;
                    Some(cfg.hash())
                }
                None => None,
            };
            cmd_verify(&file, expected.as_deref(), a.quiet)
        }
    }
}

/// Entry point shared by the binary: parses arguments, reports errors on
/// stderr and maps them to exit code 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
