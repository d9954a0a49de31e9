//! Command-line front end for `dapt-core`: runs pipelines on built-in or
//! sampled Hamiltonians and writes CSV tables with JSON summaries.

pub mod commands;
pub mod config;
pub mod error;
pub mod model;
pub mod output;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{SlopeFit, SweepResult, SweepRow};
pub use config::{ConfigArgs, RunConfig};
pub use error::{exit, CliError, CliResult};
pub use output::{Report, Table};

#[derive(Debug, Parser)]
#[command(name = "dapt", version = output::VERSION, about = "Degenerate adiabatic perturbation theory pipelines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and order-P states, residual and norm drift per node.
    Evolve(ConfigArgs),
    /// Holonomies of every level and the corrected ground holonomy.
    Holonomy(ConfigArgs),
    /// Each perturbative order and their partial sum.
    Dapt(ConfigArgs),
    /// Adiabaticity margins and the adiabatic_ok verdict.
    Validate(ConfigArgs),
    /// Residuals over a list of rates with fitted convergence orders.
    Sweep(ConfigArgs),
    /// Fit log-log slopes to columns of an existing CSV.
    FitOrder(commands::FitArgs),
}

type Runner = fn(&RunConfig) -> CliResult<Report>;

/// Run one command; returns the files written.
pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let (name, args, f): (&str, &ConfigArgs, Runner) = match &cli.command {
        Command::Evolve(a) => ("evolve", a, commands::evolve),
        Command::Holonomy(a) => ("holonomy", a, commands::holonomy),
        Command::Dapt(a) => ("dapt", a, commands::dapt),
        Command::Validate(a) => ("validate", a, commands::validate),
        Command::Sweep(a) => ("sweep", a, |c| Ok(commands::sweep(c)?.report())),
        Command::FitOrder(a) => {
            let out = a.json_path();
            let value = commands::fit_order(a)?;
            let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
            fs::write(&out, text + "\n").map_err(|source| CliError::Io {
                path: out.clone(),
                source,
            })?;
            return Ok(vec![out]);
        }
    };
    let config = args.resolve()?;
    let report = f(&config)?;
    report.write(&config.csv_path(name), &config.json_path(name), &config)
}
