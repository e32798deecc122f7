mod commands;
mod input;

use std::process::ExitCode;

use clap::error::ErrorKind as ClapKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{Failure, FailureKind};

/// Exact and numerical experiments on solenoidal manifolds.
#[derive(Parser, Debug)]
#[command(name = "solenoid-lab", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Arithmetic and Haar measure in truncated profinite integers.
    Profinite(commands::ProfiniteArgs),
    /// Baer type of a one-dimensional solenoid.
    #[command(name = "classify-1d")]
    Classify1d(commands::Classify1dArgs),
    /// Covering towers of the n-torus.
    Tower(commands::TowerArgs),
    /// Odometer of a modulus chain and the type of its suspension.
    Odometer(commands::OdometerArgs),
    /// Isometry and commensurability of Solv torus bundles.
    Solv3(commands::Solv3Args),
    /// Combinatorial Ricci flow over a finite family of fibers.
    #[command(name = "ricci-flow")]
    RicciFlow(commands::RicciArgs),
    /// Harmonic-map heat flow into the hyperbolic disk.
    Harmonic(commands::HarmonicArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Profinite(_) => "profinite",
            Command::Classify1d(_) => "classify-1d",
            Command::Tower(_) => "tower",
            Command::Odometer(_) => "odometer",
            Command::Solv3(_) => "solv3",
            Command::RicciFlow(_) => "ricci-flow",
            Command::Harmonic(_) => "harmonic",
        }
    }
}

const EXIT_NUMERIC: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn fail(subcommand: Option<&str>, f: &Failure) -> ExitCode {
    let kind = match f.kind {
        FailureKind::Precondition => "precondition",
        FailureKind::Numeric => "numeric",
    };
    let body = json!({
        "subcommand": subcommand,
        "error": { "kind": kind, "message": f.message },
        "provenance": { "version": env!("CARGO_PKG_VERSION") },
    });
    println!("{body}");
    eprintln!("solenoid-lab: {}", f.message);
    ExitCode::from(match f.kind {
        FailureKind::Precondition => EXIT_PRECONDITION,
        FailureKind::Numeric => EXIT_NUMERIC,
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("SOLENOID_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Failure::precondition(format!("SOLENOID_LAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::precondition(format!("cannot size thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ClapKind::DisplayHelp | ClapKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                ClapKind::InvalidSubcommand
                | ClapKind::MissingSubcommand
                | ClapKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    ExitCode::from(EXIT_USAGE)
                }
                _ => {
                    let sub = std::env::args().nth(1);
                    let _ = e.print();
                    fail(sub.as_deref(), &Failure::precondition(e.kind().to_string()))
                }
            };
        }
    };
    let name = cli.command.name();
    if let Err(f) = configure_threads() {
        return fail(Some(name), &f);
    }
    let result = match &cli.command {
        Command::Profinite(a) => commands::profinite(a),
        Command::Classify1d(a) => commands::classify_1d(a),
        Command::Tower(a) => commands::tower(a),
        Command::Odometer(a) => commands::odometer(a),
        Command::Solv3(a) => commands::solv3(a),
        Command::RicciFlow(a) => commands::ricci_flow(a),
        Command::Harmonic(a) => commands::harmonic(a),
    };
    match result {
        Ok(report) => {
            println!("{}", report.to_json());
            ExitCode::SUCCESS
        }
        Err(f) => fail(Some(name), &f),
    }
}
