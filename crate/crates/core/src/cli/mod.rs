//! Scenario runner behind the `scrap` binary.

mod config;
mod output;
mod scenarios;

use std::path::PathBuf;

use clap::Parser;

pub use config::{CouplingOptions, IntegratorConfig, LzOptions, ScenarioConfig, ScenarioKind, SpectrumOptions};
pub use output::{column_label, emit_timeseries, write_table, Metadata, RunSummary};
pub use scenarios::{lz_numeric, run_scenario, ScenarioError};

use crate::error::ScrapError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const DEFAULT_OUT_DIR: &str = "scrap-out";

#[derive(Debug, Parser)]
#[command(name = "scrap", version, about = "Run SCRAP gate simulations")]
pub struct Args {
    /// Scenario config (TOML, or JSON including a previous summary.json).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scenario to run; overrides the config. Without --config the shipped
    /// default for the scenario is used.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Integrator tolerance; overrides the config.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub quiet: bool,
}

fn resolve(args: &Args) -> Result<(ScenarioConfig, PathBuf), ScrapError> {
    let scenario = args.scenario.as_deref().map(str::parse::<ScenarioKind>).transpose()?;
    let mut config = match (&args.config, scenario) {
        (Some(path), _) => ScenarioConfig::load(path)?,
        (None, Some(kind)) => kind.default_config(),
        (None, None) => return Err(ScrapError::Config("need --config or --scenario".into())),
    };
    if let Some(kind) = scenario {
        config.scenario = kind;
    }
    if let Some(tol) = args.tol {
        config.integrator.tol = tol;
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    Ok((config, out))
}

/// Runs the CLI and returns the process exit code.
pub fn run(args: &Args) -> i32 {
    let (config, out) = match resolve(args) {
        Ok(resolved) => resolved,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match run_scenario(&config, &out) {
        Ok(summary) => {
            for warning in &summary.warnings {
                eprintln!("warning: {warning}");
            }
            if !args.quiet {
                println!("{} -> {}", summary.scenario, out.join("summary.json").display());
                for (name, value) in &summary.metrics {
                    println!("  {name} = {value:.9e}");
                }
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INVALID
            }
        }
    }
}
