//! fogsim: deterministic fog-computing traffic signal simulation.

mod commands;
mod config_file;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use fogsim_core::config::ScenarioConfig;
use fogsim_core::controller::ControllerKind;
use fogsim_core::SimDuration;

use config_file::ScenarioFile;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration: exit code 2.
    #[error("{0}")]
    Config(String),
    /// Failure while running or writing results: exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fogsim",
    version,
    about = "Deterministic discrete-event simulation of a fog-computing traffic signal deployment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file (JSON); flags override its keys.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Number of roads (one fog node, camera and LED trio per road).
    #[arg(long, value_name = "N")]
    roads: Option<usize>,

    /// Simulated duration in seconds.
    #[arg(long, value_name = "S")]
    duration: Option<f64>,

    /// Seed for all randomness in the run.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Output directory for CSV files and the config echo.
    #[arg(long, value_name = "DIR", default_value = "fogsim-out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its metric CSVs.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Controller: itcms, stl or iov.
        #[arg(long, value_name = "K")]
        controller: Option<String>,
    },
    /// Run the same scenario under several controllers and compare them.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated controllers, e.g. itcms,stl,iov.
        #[arg(long, value_delimiter = ',', value_name = "A,B,..", required = true)]
        controllers: Vec<String>,
    },
    /// Run the scenario at several fog-node counts and tabulate the rows.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated fog-node counts, e.g. 4,8,14.
        #[arg(long, value_delimiter = ',', value_name = "L", required = true)]
        nodes: Vec<usize>,
        /// Controller: itcms, stl or iov.
        #[arg(long, value_name = "K")]
        controller: Option<String>,
    },
    /// Print the built-in default scenario as a complete config file.
    PrintDefaultConfig,
}

fn parse_controller(name: &str) -> Result<ControllerKind, CliError> {
    ControllerKind::parse(name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown controller '{name}' (valid: itcms, stl, iov)"
        ))
    })
}

/// defaults <- config file <- flags
fn build_config(common: &CommonArgs, controller: Option<&str>) -> Result<ScenarioConfig, CliError> {
    let mut cfg = ScenarioConfig::default();
    if let Some(path) = &common.config {
        ScenarioFile::load(path)?.apply(&mut cfg)?;
    }
    if let Some(roads) = common.roads {
        cfg.roads = roads;
    }
    if let Some(duration) = common.duration {
        cfg.duration = SimDuration::try_from_secs_f64(duration)
            .filter(|d| !d.is_zero())
            .ok_or_else(|| {
                CliError::Config("--duration must be a positive number of seconds".into())
            })?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(name) = controller {
        let kind = parse_controller(name)?;
        cfg.controller = commands::controller_for(&cfg, kind);
    }
    cfg.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common, controller } => {
            let cfg = build_config(&common, controller.as_deref())?;
            commands::run(cfg, &common.out)
        }
        Command::Compare {
            common,
            controllers,
        } => {
            let kinds = controllers
                .iter()
                .map(|s| parse_controller(s))
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = build_config(&common, None)?;
            commands::compare(cfg, &kinds, &common.out)
        }
        Command::Sweep {
            common,
            nodes,
            controller,
        } => {
            let cfg = build_config(&common, controller.as_deref())?;
            commands::sweep(cfg, &nodes, &common.out)
        }
        Command::PrintDefaultConfig => {
            println!(
                "{}",
                ScenarioFile::full(&ScenarioConfig::default()).to_json_pretty()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
