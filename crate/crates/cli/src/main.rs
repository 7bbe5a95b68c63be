//! `stdens`: reproducible experiments on spacetime densities.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure,
//! 4 I/O error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Overrides;
use crate::error::{CliError, CliResult};
use crate::output::OutDir;

#[derive(Parser)]
#[command(name = "stdens", version, about = "Spacetime probability densities of free particles on a 1+1D box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides [output] dir.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Sampling seed; overrides [sampling] seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid as <n_time>x<n_space>; overrides [grid].
    #[arg(long, global = true, value_parser = parse_grid, value_name = "NTxNX")]
    grid: Option<(usize, usize)>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Density, marginals and region probabilities.
    Density,
    /// Boost invariance of the density and of region probabilities.
    BoostCheck,
    /// Mode spectrum, mean four-momentum and charge.
    Momentum,
    /// Simulated observation sessions and goodness of fit.
    Sample,
    /// Region-count operators and the single-particle subsystem.
    Fock,
    /// Coordinate and momentum spreads.
    Uncertainty,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (t, x) = s.split_once('x').ok_or_else(|| format!("expected <nt>x<nx>, got {s:?}"))?;
    let n = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((n(t)?, n(x)?))
}

fn run(cli: &Cli) -> CliResult<commands::Outcome> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <PATH> is required".into()))?;
    let overrides = Overrides {
        seed: cli.seed,
        grid: cli.grid,
        out: cli.out.clone(),
    };
    let scenario = config::load(path, &overrides)?;
    let mut out = OutDir::create(&scenario.out)?;
    let outcome = match cli.command {
        Command::Density => commands::density_cmd(&scenario, &mut out),
        Command::BoostCheck => commands::boost_check_cmd(&scenario, &mut out),
        Command::Momentum => commands::momentum_cmd(&scenario, &mut out),
        Command::Sample => commands::sample_cmd(&scenario, &mut out),
        Command::Fock => commands::fock_cmd(&scenario, &mut out),
        Command::Uncertainty => commands::uncertainty_cmd(&scenario, &mut out),
    }?;
    if !cli.quiet {
        for p in out.written() {
            println!("wrote {}", p.display());
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if !cli.quiet {
                println!("{}", outcome.summary);
            }
            match outcome.failure {
                Some(msg) => {
                    eprintln!("stdens: numeric failure: {msg}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("stdens: {e}");
            e.exit_code()
        }
    }
}
