//! `circle-eq`: solve, optimize, verify, sweep and plot electrostatic
//! equilibria on the unit circle.
//!
//! Exit codes: 0 success, 1 verification threshold exceeded, 2 input error,
//! 3 non-convergence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod schema;
mod svg;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::schema::Space;

#[derive(Debug, Parser)]
#[command(name = "circle-eq", version, about = "Electrostatic equilibria of charges on the unit circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct ParamArgs {
    /// Unit charges per arc
    #[arg(long)]
    n: u64,
    /// Number of p charges (and of q charges)
    #[arg(long)]
    m: u64,
    /// Charge of the particles at the m-th roots of 1
    #[arg(long)]
    p: f64,
    /// Charge of the particles at the m-th roots of -1
    #[arg(long)]
    q: f64,
}

#[derive(Debug, Clone, Args)]
struct OutputArg {
    /// Write to this file instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic equilibrium from the Jacobi zeros, with a verification summary
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        /// Configuration space to report
        #[arg(long, value_enum, default_value_t = Space::S)]
        space: Space,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Damped Newton maximization, compared against the analytic equilibrium
    Optimize {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Space::S)]
        space: Space,
        /// Number of runs; the first starts from --initial or the midpoint, the rest from random points
        #[arg(long, default_value_t = 1)]
        starts: usize,
        /// Seed for the random starts
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Configuration document to start the first run from
        #[arg(long)]
        initial: Option<PathBuf>,
        /// Gradient sup-norm tolerance
        #[arg(long, default_value_t = 1e-11)]
        tolerance: f64,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Full verification report for a configuration document
    Verify {
        /// Configuration document (output of solve or optimize)
        config: PathBuf,
        /// Relative threshold every residual must meet
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Solve and verify over a parameter grid
    Sweep {
        /// Values of n: `a..b` (inclusive), `a:b`, or a comma list
        #[arg(long)]
        n: String,
        /// Values of m, same syntax as --n
        #[arg(long)]
        m: String,
        /// Comma-separated values of p
        #[arg(long)]
        p: String,
        /// Comma-separated values of q
        #[arg(long)]
        q: String,
        #[arg(long, value_enum, default_value_t = sweep::Format::Json)]
        format: sweep::Format,
        /// Relative threshold for the per-record pass flag
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// SVG figure of a configuration
    Plot {
        /// Configuration document; if absent, the analytic equilibrium for --n --m --p --q is drawn
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[command(flatten)]
        out: OutputArg,
    },
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Verification(String),
    NonConvergence(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::NonConvergence(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Verification(m) | Failure::NonConvergence(m) => m,
        }
    }
}

impl From<circle_eq_core::Error> for Failure {
    fn from(e: circle_eq_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(format!("{e:#}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { params, space, out } => commands::solve(&params, space, out.output.as_deref()),
        Command::Optimize { params, space, starts, seed, initial, tolerance, max_iterations, out } => {
            let settings = commands::OptimizeSettings { space, starts, seed, initial, tolerance, max_iterations };
            commands::optimize(&params, &settings, out.output.as_deref())
        }
        Command::Verify { config, threshold, out } => commands::verify(&config, threshold, out.output.as_deref()),
        Command::Sweep { n, m, p, q, format, threshold, out } => {
            sweep::run(&n, &m, &p, &q, format, threshold, out.output.as_deref())
        }
        Command::Plot { config, n, m, p, q, out } => commands::plot(config.as_deref(), n, m, p, q, out.output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("circle-eq: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
