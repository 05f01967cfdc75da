//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_run_config, RunConfig};
use crate::error::Error;
use crate::experiments::{
    bisect_empirical_threshold, constants_report, convergence_study, oracle_comparison,
    run_simulation, run_sync_experiment, ExperimentReport,
};
use crate::integrator::Trajectory;
use crate::output::{format_report, write_report, write_timeseries};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hr-sync",
    version,
    about = "Coupled Hindmarsh-Rose neuron simulator and estimate checker"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration file.
    pub config: PathBuf,
    /// Directory for report.txt and timeseries.csv.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Do not print the report.
    #[arg(long)]
    pub quiet: bool,
    /// Override the initial-condition seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate and check the dissipativity bounds.
    Simulate(CommonArgs),
    /// Integrate and check the synchronization bound and decay rate.
    Sync(CommonArgs),
    /// Bisect the coupling strength for the empirical threshold.
    Threshold(CommonArgs),
    /// Temporal and spatial convergence orders.
    Converge(CommonArgs),
    /// Compare against the ODE integrator on spatially constant data.
    Oracle(CommonArgs),
    /// Print the derived constants.
    Constants(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::Sync(a)
            | Command::Threshold(a)
            | Command::Converge(a)
            | Command::Oracle(a)
            | Command::Constants(a) => a,
        }
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, String> {
    let text =
        fs::read_to_string(&args.config).map_err(|e| format!("{}: {e}", args.config.display()))?;
    let mut cfg = parse_run_config(&text).map_err(|e| format!("{}: {e}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.initial.seed = seed;
    }
    Ok(cfg)
}

fn execute(
    command: &Command,
    cfg: &RunConfig,
) -> crate::error::Result<(ExperimentReport, Option<Trajectory>)> {
    Ok(match command {
        Command::Simulate(_) => {
            let (r, t) = run_simulation(cfg)?;
            (r, Some(t))
        }
        Command::Sync(_) => {
            let (r, t) = run_sync_experiment(cfg)?;
            (r, Some(t))
        }
        Command::Threshold(_) => {
            let e = &cfg.experiment;
            (
                bisect_empirical_threshold(cfg, e.p_lo, e.p_hi, e.tol)?.report,
                None,
            )
        }
        Command::Converge(_) => (convergence_study(cfg)?, None),
        Command::Oracle(_) => (oracle_comparison(cfg)?, None),
        Command::Constants(_) => (constants_report(cfg)?, None),
    })
}

fn write_outputs(
    dir: &Path,
    report: &ExperimentReport,
    traj: Option<&Trajectory>,
) -> crate::error::Result<()> {
    fs::create_dir_all(dir)?;
    write_report(&dir.join("report.txt"), report)?;
    if let Some(t) = traj {
        write_timeseries(&dir.join("timeseries.csv"), &t.records)?;
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let args = cli.command.common();
    let cfg = match load_config(args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    log::info!(
        "running {} with {}",
        cfg.experiment.name,
        args.config.display()
    );
    let (report, traj) = match execute(&cli.command, &cfg) {
        Ok(out) => out,
        Err(err) => {
            eprintln!("error: {err}");
            return match err {
                Error::MalformedBracket { .. } | Error::Config { .. } => EXIT_USAGE,
                _ => EXIT_FAILURE,
            };
        }
    };
    if !args.quiet {
        print!("{}", format_report(&report));
    }
    if let Some(dir) = &args.out {
        if let Err(err) = write_outputs(dir, &report, traj.as_ref()) {
            eprintln!("error: {err}");
            return EXIT_FAILURE;
        }
    }
    if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "hr-sync", "sync", "run.cfg", "--out", "o", "--quiet", "--seed", "7",
        ])
        .unwrap();
        let a = cli.command.common();
        assert_eq!(a.config, PathBuf::from("run.cfg"));
        assert_eq!(a.seed, Some(7));
        assert!(a.quiet);
    }
}
