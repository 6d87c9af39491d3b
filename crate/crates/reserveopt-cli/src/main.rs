//! Command line front end for the `reserveopt` valuation engine.
//!
//! The binary exposes the analytic machinery of the library as five
//! subcommands:
//!
//! - `calibrate`: fit an Ornstein-Uhlenbeck model to a two-column
//!   price CSV, with optional winsorization and daily averaging.
//! - `value`: solve a single-option or lifetime valuation problem and
//!   emit the solution as JSON, sustainability report included.
//! - `sweep`: evaluate a family of contracts along one axis (strike,
//!   total premium, premium split, or purchase threshold) into a CSV.
//! - `simulate`: Monte Carlo estimate of a threshold policy next to
//!   its analytic value, with a standard-error verdict.
//! - `verify`: certify a candidate lifetime solution against the
//!   fixed-point system it must satisfy.
//!
//! Commands write their primary payload to stdout, or to `--output`
//! when given; a file output is accompanied by a run manifest at
//! `<out>.manifest.json` recording the resolved configuration, tool
//! version, timestamp, and SHA-256 digests of every input. Payloads
//! contain no timestamps, so identical configuration and seed yield
//! byte-identical output.
//!
//! Exit codes are part of the interface: 0 on success, 2 for data or
//! model errors (unreadable files, malformed specs, failed solves),
//! 3 for validation failures (simulation disagreeing with the
//! analytic value, a rejected verification), 64 for usage errors.

mod commands;
mod input;
mod manifest;

use std::process;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use reserveopt::TimeUnit;

// ---- exit codes ----

pub const EXIT_DATA: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// A command failure carrying the exit code it maps to. Data errors
/// cover everything the library reports (bad input files, invalid
/// specs, solver breakdowns); validation failures are disagreements a
/// command was asked to check; usage failures are malformed
/// invocations caught before any work starts.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Validation(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Validation(_) => EXIT_VALIDATION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Validation(m) => m,
        }
    }
}

impl From<reserveopt::Error> for Failure {
    fn from(e: reserveopt::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

pub type CmdResult<T> = Result<T, Failure>;

// ---- argument surface ----

const EXIT_HELP: &str = "Exit codes:
  0    success
  2    data or model error: unreadable input, malformed spec, failed solve
  3    validation failure: simulation disagrees with the analytic value,
       or a verification check rejects the candidate solution
  64   usage error: bad flags, malformed grid, inconsistent bounds";

fn parse_time_unit(s: &str) -> Result<TimeUnit, String> {
    s.parse::<TimeUnit>().map_err(|e| e.to_string())
}

#[derive(Parser)]
#[command(
    name = "reserveopt",
    version,
    about = "Valuation of physically covered reserve options on a mean-reverting imbalance price",
    after_help = EXIT_HELP,
    subcommand_required = true,
    arg_required_else_help = true
)]
pub struct Cli {
    /// Unit of rates and volatilities in input specs (prices never scale)
    #[arg(long, global = true, default_value = "day", value_parser = parse_time_unit)]
    pub time_unit: TimeUnit,

    /// Master seed for Monte Carlo commands
    #[arg(long, global = true, default_value_t = 2024)]
    pub seed: u64,

    /// Residual tolerance for verification checks
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Fit an Ornstein-Uhlenbeck model to a price CSV
    Calibrate(commands::calibrate::CalibrateArgs),
    /// Solve a valuation problem and emit the solution as JSON
    Value(commands::value::ValueArgs),
    /// Evaluate a family of contracts along one axis into a CSV
    Sweep(commands::sweep::SweepArgs),
    /// Monte Carlo estimate of a threshold policy against its analytic value
    Simulate(commands::simulate::SimulateArgs),
    /// Certify a candidate lifetime solution against the fixed-point system
    Verify(commands::verify::VerifyArgs),
}

fn run(cli: &Cli) -> CmdResult<()> {
    match &cli.command {
        Command::Calibrate(args) => commands::calibrate::run(cli, args),
        Command::Value(args) => commands::value::run(cli, args),
        Command::Sweep(args) => commands::sweep::run(cli, args),
        Command::Simulate(args) => commands::simulate::run(cli, args),
        Command::Verify(args) => commands::verify::run(cli, args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            process::exit(code);
        }
    };
    if let Err(f) = run(&cli) {
        eprintln!("reserveopt: {}", f.message());
        process::exit(f.code());
    }
}
