//! `parahyp`: parabolicity and hyperbolicity tests, capacities, potentials
//! and oracle runs from configuration files.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "parahyp", version, about = "Parabolicity and hyperbolicity of radially controlled submanifolds")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (JSON, or TOML by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Quadrature tolerance applied to every integral.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,
    /// Overrides the seed of a simulation config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; changes speed only, never results.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide parabolic or hyperbolic type and print the certificate.
    Classify,
    /// Drifted capacity of an annulus.
    Capacity,
    /// Potential on a log-spaced grid, as CSV.
    Potential,
    /// Monte Carlo hitting probability.
    Simulate,
    /// Network conductance convergence study.
    Network,
    /// Show a catalog example and classify it; lists names when none given.
    Catalog { name: Option<String> },
}

/// Definite results exit 0, inconclusive ones 2, errors 1.
pub enum Status {
    Definite,
    Inconclusive,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(Status::Definite) => ExitCode::SUCCESS,
        Ok(Status::Inconclusive) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
