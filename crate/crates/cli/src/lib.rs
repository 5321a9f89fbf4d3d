//! Command-line front end for `rail-core`: batch experiments, a single
//! inspectable scene, and SVG charts of per-run errors.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rail_core::experiment::{ExperimentConfig, ExperimentError};

pub mod output;
pub mod plot;
pub mod scene;
pub mod svg;

#[derive(Debug, Parser)]
#[command(
    name = "rail",
    version,
    about = "RSSI-only node localization simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full experiment and write report.csv, runs.csv and errors.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the base seed of the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Localize one deployment and draw a scene for a single target.
    Demo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Unknown node to draw; defaults to the lowest unknown id.
        #[arg(long)]
        target: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw one chart per density from a runs.csv file.
    Plot {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failed command together with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    /// Bad input: unreadable or invalid config, malformed CSV, bad flags.
    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 1,
            error: error.into(),
        }
    }

    /// No deployment satisfying the constraints could be drawn.
    pub fn generation(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 2,
            error: error.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::input(anyhow::anyhow!(
            "cannot read config {}: {e}",
            path.display()
        ))
    })?;
    ExperimentConfig::from_json(&text)
        .map_err(|e| Failure::input(anyhow::anyhow!("invalid config {}: {e}", path.display())))
}

/// Executes a parsed command. Human-readable results go to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn std::io::Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Run { config, out, seed } => cmd_run(config, out, *seed, stdout),
        Command::Demo {
            config,
            seed,
            target,
            out,
        } => scene::cmd_demo(config, *seed, *target, out, stdout),
        Command::Plot { runs, out } => plot::cmd_plot(runs, out, stdout),
    }
}

pub fn cmd_run(
    config: &Path,
    out: &Path,
    seed: Option<u64>,
    stdout: &mut dyn std::io::Write,
) -> Result<(), Failure> {
    let mut cfg = load_config(config)?;
    if let Some(seed) = seed {
        cfg.base_seed = seed;
    }
    log::info!(
        "running {} densities x {} runs, base seed {}",
        cfg.densities.len(),
        cfg.runs_per_density,
        cfg.base_seed
    );
    let report = rail_core::experiment::run_experiment(&cfg).map_err(|e| match e {
        ExperimentError::GenerationFailed { .. } => Failure::generation(e),
        other => Failure::input(other),
    })?;

    let mut staged = output::Staged::new(out).map_err(Failure::input)?;
    staged.add("report.csv", report.report_csv().as_bytes());
    staged.add("runs.csv", report.runs_csv().as_bytes());
    staged.add("errors.csv", report.errors_csv().as_bytes());
    staged.commit().map_err(Failure::input)?;

    write!(stdout, "{}", report.summary_table()).map_err(Failure::input)?;
    Ok(())
}
