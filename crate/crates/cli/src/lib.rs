//! Command-line runner for the femtocell models.
//!
//! Every subcommand resolves a scenario (defaults, then `--config`, then
//! `--set`, then `--seed`/`--trials`), runs one registered experiment and
//! writes its tables plus `manifest.json` into the output directory.

pub mod config;
pub mod experiments;
pub mod output;

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use femtocell_core::engine::SweepAxis;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::experiments::{ExperimentArgs, ExperimentRegistry};
use crate::output::{to_pretty_json, write_file, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario JSON file; missing keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a scenario key, e.g. `--set gamma_macro_db=10`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, default_value = "out", global = true)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse().map_err(|e: femtocell_core::Error| e.to_string())
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Positional outage curves and cell-averaged outage.
    AnalyzeOutage {
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, value_delimiter = ',', default_value = "4,5")]
        exponents: Vec<f64>,
    },
    /// DS-CDMA capacity curves and the perfect/imperfect comparison.
    AnalyzeCapacity,
    /// Worst-case co-channel S/I table.
    WorstCaseSir,
    /// Monte Carlo outage for both tiers.
    Simulate,
    /// Outage along one axis.
    Sweep {
        #[arg(long, value_parser = parse_axis)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        /// Cross the axis with every sector mode and power-control setting.
        #[arg(long)]
        all_variants: bool,
    },
    /// Femto traffic and spectrum sharing snapshots.
    Traffic {
        #[arg(long, default_value_t = 18.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        rounds: u32,
    },
    /// Admissible macro users versus femto user density.
    Density {
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,4")]
        densities: Vec<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AnalyzeOutage { .. } => "analyze-outage",
            Command::AnalyzeCapacity => "analyze-capacity",
            Command::WorstCaseSir => "worst-case-sir",
            Command::Simulate => "simulate",
            Command::Sweep { .. } => "sweep",
            Command::Traffic { .. } => "traffic",
            Command::Density { .. } => "density",
        }
    }

    pub fn experiment_args(&self) -> ExperimentArgs {
        let mut args = ExperimentArgs::default();
        match self {
            Command::AnalyzeOutage { points, exponents } => {
                args.points = *points;
                args.exponents = exponents.clone();
            }
            Command::Sweep {
                axis,
                values,
                all_variants,
            } => {
                args.axis = Some(*axis);
                args.values = values.clone();
                args.all_variants = *all_variants;
            }
            Command::Traffic { lambda, rounds } => {
                args.lambda = *lambda;
                args.rounds = *rounds;
            }
            Command::Density { densities } => args.densities = densities.clone(),
            Command::AnalyzeCapacity | Command::WorstCaseSir | Command::Simulate => {}
        }
        args
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "femtosim", version, about = "Two-tier macro/femto outage, capacity and spectrum experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Failure split by exit code.
#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            CliError::Config(e) | CliError::Runtime(e) => e,
        }
    }
}

/// Runs a parsed command line and returns the manifest it wrote.
pub fn run(cli: &Cli) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    let common = &cli.common;
    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("master_seed={seed}"));
    }
    if let Some(trials) = common.trials {
        overrides.push(format!("trials={trials}"));
    }
    let scenario = config::load_scenario(common.config.as_deref(), &overrides).map_err(CliError::Config)?;

    let name = cli.command.name();
    let registry = ExperimentRegistry::builtin();
    let experiment = registry
        .get(name)
        .ok_or_else(|| CliError::Config(anyhow::anyhow!("unknown subcommand `{name}`")))?;
    let args = cli.command.experiment_args();
    let artifacts = experiment.run(&scenario, &args).map_err(CliError::Runtime)?;

    let resolved = serde_json::to_value(&scenario).map_err(|e| CliError::Runtime(e.into()))?;
    let arguments = serde_json::to_value(&args).map_err(|e| CliError::Runtime(e.into()))?;
    let config_hash = {
        let canonical = json!({ "subcommand": name, "scenario": resolved, "arguments": arguments });
        hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
    };

    write_outputs(&common.out, common.format, name, &config_hash, &scenario, artifacts, |outputs| RunManifest {
        tool: "femtosim".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: name.into(),
        scenario_path: common.config.as_ref().map(|p| p.display().to_string()),
        overrides: common.overrides.clone(),
        arguments: arguments.clone(),
        config_hash: config_hash.clone(),
        master_seed: scenario.master_seed,
        outputs,
        wall_clock_ms: started.elapsed().as_millis(),
        resolved_config: resolved.clone(),
    })
    .map_err(CliError::Runtime)
}

fn write_outputs(
    dir: &std::path::Path,
    format: Format,
    subcommand: &str,
    config_hash: &str,
    scenario: &femtocell_core::engine::Scenario,
    artifacts: experiments::Artifacts,
    manifest: impl FnOnce(Vec<String>) -> RunManifest,
) -> anyhow::Result<RunManifest> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut outputs = Vec::new();
    match format {
        Format::Csv => {
            for table in &artifacts.tables {
                write_file(dir, &table.file_name(), &table.to_csv()?)?;
                outputs.push(table.file_name());
            }
        }
        Format::Json => {
            let tables: serde_json::Map<String, serde_json::Value> =
                artifacts.tables.iter().map(|t| (t.name.clone(), t.to_json())).collect();
            let report = json!({
                "subcommand": subcommand,
                "version": env!("CARGO_PKG_VERSION"),
                "config_hash": config_hash,
                "master_seed": scenario.master_seed,
                "tables": tables,
                "report": artifacts.report,
            });
            write_file(dir, "report.json", &to_pretty_json(&report)?)?;
            outputs.push("report.json".into());
        }
    }
    for (name, bytes) in &artifacts.files {
        write_file(dir, name, bytes)?;
        outputs.push(name.clone());
    }
    outputs.push("manifest.json".into());
    let manifest = manifest(outputs);
    write_file(dir, "manifest.json", &to_pretty_json(&manifest)?)?;
    Ok(manifest)
}

/// Parses `argv`, runs, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(manifest) => {
            for path in &manifest.outputs {
                println!("{}", cli.common.out.join(path).display());
            }
            EXIT_OK
        }
        Err(err) => {
            eprintln!("error: {:#}", err.error());
            err.exit_code()
        }
    }
}
