//! Command-line front end: configuration files, run directories, sweeps and
//! plot-data emission.
//!
//! ```text
//! openqdyn run      --config <path> [--out <dir>] [--workers N] [--figure <id>]
//! openqdyn single   --config <path> ...
//! openqdyn sweep    --config <path> ...
//! openqdyn scan     --config <path> ...
//! openqdyn ibm      --config <path> ...
//! openqdyn plotdata --figure <id> [--out <dir>] [ARTIFACT ...]
//! ```
//!
//! Exit codes: 0 success, 2 configuration, 3 numerical, 4 resource.
//! Failures print a single JSON object on stderr.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    emit_plot_data, exponent_grid, run_alpha_sweep, run_boundary_scan, run_ibm, run_single,
    BoundaryRow, RunArtifact, FIGURES,
};
pub use config::{
    BathSection, Mode, OutputSection, RunConfig, ScanSection, SystemSection, TempoSection,
};
pub use output::{
    fmt_sig, read_trajectory_csv, run_id, trajectory_csv, TrajectoryTable, PHASE_BOUNDARY_HEADER,
    TRAJECTORY_HEADER,
};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Io(_) => EXIT_CONFIG,
        Error::Numerical { .. } | Error::Fit(_) | Error::Scan(_) => EXIT_NUMERICAL,
        Error::Resource { .. } => EXIT_RESOURCE,
    }
}

/// The JSON object printed on stderr for a failure.
pub fn error_report(e: &Error) -> serde_json::Value {
    let mut v = serde_json::json!({
        "error": e.kind(),
        "message": e.to_string(),
        "exit_code": exit_code(e),
    });
    match e {
        Error::Numerical { achieved_error, .. } => {
            v["achieved_error"] = serde_json::json!(achieved_error);
        }
        Error::Resource {
            partial: Some(t), ..
        } => {
            v["completed_steps"] = serde_json::json!(t.len().saturating_sub(1));
        }
        _ => {}
    }
    v
}

#[derive(Debug, Parser)]
#[command(
    name = "openqdyn",
    version,
    about = "Two-state open quantum dynamics with super-Ohmic baths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run whatever the config's `mode` selects.
    Run(RunArgs),
    /// Single trajectory (`single` or `asymmetric` mode).
    Single(RunArgs),
    /// One trajectory per coupling in `scan.alpha_grid`.
    Sweep(RunArgs),
    /// Pseudo-coherent boundary α_B(s) over `scan.s_grid`.
    Scan(RunArgs),
    /// Closed-form pure-dephasing trajectory.
    Ibm(RunArgs),
    /// Plot-ready curve files from existing artifacts.
    Plotdata(PlotArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output root; overrides `output.dir`, default `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "OPENQDYN_WORKERS")]
    workers: Option<usize>,
    /// Also emit plot data for this figure from the new artifacts.
    #[arg(long)]
    figure: Option<String>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    figure: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run directories, trajectory tables or boundary tables.
    artifacts: Vec<PathBuf>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn execute(cmd: Command) -> Result<()> {
    let (args, forced) = match cmd {
        Command::Plotdata(p) => {
            let out = p.out.unwrap_or_else(|| PathBuf::from("out"));
            for path in emit_plot_data(&p.figure, &p.artifacts, &out)? {
                println!("{}", path.display());
            }
            return Ok(());
        }
        Command::Run(a) => (a, None),
        Command::Single(a) => (a, Some(&[Mode::Single, Mode::Asymmetric][..])),
        Command::Sweep(a) => (a, Some(&[Mode::SweepAlpha][..])),
        Command::Scan(a) => (a, Some(&[Mode::ScanBoundary][..])),
        Command::Ibm(a) => (a, Some(&[Mode::IbmAnalytic][..])),
    };
    if args.workers == Some(0) {
        return Err(Error::Config("--workers must be >= 1".into()));
    }
    if let Some(fig) = &args.figure {
        if !FIGURES.contains(&fig.as_str()) {
            return Err(Error::Config(format!("unknown figure id {fig:?}")));
        }
    }
    let config = RunConfig::load(&args.config)?;
    if let Some(allowed) = forced {
        if !allowed.contains(&config.mode) {
            return Err(Error::Config(format!(
                "config mode {} does not match this subcommand",
                config.mode.as_str()
            )));
        }
    }
    let out = args
        .out
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let workers = args.workers.unwrap_or_else(default_workers);
    let artifacts: Vec<PathBuf> = match config.mode {
        Mode::Single | Mode::Asymmetric => vec![run_single(&config, &out)?.dir],
        Mode::IbmAnalytic => vec![run_ibm(&config, &out)?.dir],
        Mode::SweepAlpha => run_alpha_sweep(&config, &out, workers)?
            .into_iter()
            .map(|a| a.dir)
            .collect(),
        Mode::ScanBoundary => {
            let rows = run_boundary_scan(&config, &out, workers)?;
            for row in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!("s = {}: {}", row.s, row.error.as_deref().unwrap_or(""));
            }
            vec![out.join("phase_boundary.csv")]
        }
    };
    for a in &artifacts {
        println!("{}", a.display());
    }
    if let Some(fig) = &args.figure {
        for path in emit_plot_data(fig, &artifacts, &out)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}

/// Parse arguments and run; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", error_report(&e));
            exit_code(&e)
        }
    }
}
