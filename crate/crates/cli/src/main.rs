//! `wfl`: friction coefficients, trajectories and convergence sweeps from a
//! JSON experiment file.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Outcome;
use config::Experiment;
use error::CliError;

#[derive(Parser)]
#[command(name = "wfl", version, about = "Dry friction from wiggly energies")]
struct Cli {
    /// Experiment file (JSON); the canonical setup when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: config `output.dir`, else `out`].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Friction coefficients of the configured model.
    Coeffs,
    /// Coefficients over a grid of bristle angles.
    SweepTheta,
    /// Integrate the viscous flow and optionally the limit play operator.
    Simulate {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        limit: bool,
    },
    /// Convergence sweep over the configured scales.
    Converge,
    /// With/against the nap friction and rod tension.
    Nap,
    /// The profile as seen through the bristle kinematics.
    Perceived,
    /// Tabulate the limit dissipation factor K(ξ).
    KTable,
}

fn threads() -> Result<Option<usize>, CliError> {
    match std::env::var("WFL_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "WFL_THREADS must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn write_all(dir: &Path, outcome: &Outcome) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for f in &outcome.files {
        std::fs::write(dir.join(&f.name), &f.contents)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let exp = Experiment::load(cli.config.as_deref())?;
    let svg = cli.svg || exp.config.output.svg;
    let outcome = match cli.command {
        Command::Coeffs => commands::coeffs(&exp)?,
        Command::SweepTheta => commands::sweep_theta(&exp, svg)?,
        Command::Simulate { epsilon, limit } => commands::simulate(&exp, epsilon, limit, svg)?,
        Command::Converge => commands::converge(&exp, threads()?, svg)?,
        Command::Nap => commands::nap(&exp)?,
        Command::Perceived => commands::perceived(&exp, svg)?,
        Command::KTable => commands::k_table(&exp, svg)?,
    };
    let dir = cli
        .out
        .or_else(|| exp.config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    write_all(&dir, &outcome)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for f in &outcome.files {
        println!("wrote {}", dir.join(&f.name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wfl: {e}");
            e.exit_code()
        }
    }
}
