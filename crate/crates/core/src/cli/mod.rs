//! The `localpower` command line.
//!
//! Every subcommand prints one JSON document on stdout. Exit codes: 0 on
//! success, 2 for domain errors (with a JSON error object), 64 for usage
//! errors, 65 for a malformed function spec.

mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{BoundConfig, BoundsError};
use crate::chebotarev::ChebotarevError;
use crate::lattice::LatticeError;
use crate::modular::ModularError;
use crate::powermap::PowerMapError;
use crate::ratfact::RatError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_SPEC: i32 = 65;

#[derive(Debug, Parser)]
#[command(
    name = "localpower",
    version,
    about = "Local power maps, relation lattices and Frobenius statistics"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Prime cache file, read when it covers the range and rewritten otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    pub prime_cache: Option<PathBuf>,
    /// Worker threads for prime scans (default: available cores).
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Also write per-prime rows of a scan as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub implied_constant: f64,
    /// Chebyshev constant `M` (default log 4).
    #[arg(long = "chebyshev-m", global = true, value_name = "M")]
    pub chebyshev_m: Option<f64>,
}

impl GlobalArgs {
    pub fn config(&self) -> BoundConfig {
        BoundConfig {
            m: self.chebyshev_m.unwrap_or(BoundConfig::default().m),
            c1: self.c1,
            c2: self.c2,
            implied_constant: self.implied_constant,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primes p ≤ limit where a multiplicative map is a local power map.
    SfScan(SfArgs),
    /// Primes passing the shift test f(n+p) ≡ f(n) (mod p), against S_f.
    TfScan(TfArgs),
    /// Integers whose values rule out a global power map.
    Witness(WitnessArgs),
    /// A function with prescribed local exponents, built by CRT.
    Construct(ConstructArgs),
    /// Integer relations and maximal minors of a tuple of rationals.
    Relations(TupleArgs),
    /// Degree of the Kummer extension generated by ℓ-th roots of a tuple.
    KummerDegree(KummerArgs),
    /// Frobenius data of a tuple at one split prime.
    Frobenius(FrobeniusArgs),
    /// Share of split primes with Frobenius in the target class.
    DensityScan(DensityArgs),
    /// Primes where f agrees with a single power on the witnesses.
    Heuristic(HeuristicArgs),
    /// Schedule, Mertens, Chebyshev and main-term evaluators.
    Bounds(BoundsArgs),
    /// Discriminant of a cyclotomic field or bound for a Kummer field.
    Disc(DiscArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Empirical,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SfArgs {
    /// Function spec (JSON).
    #[arg(long)]
    pub function: PathBuf,
    #[arg(long, value_parser = parse_count)]
    pub limit: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Verification bound for empirical mode.
    #[arg(long, default_value_t = 1000, value_parser = parse_count)]
    pub bound: u64,
    /// Include per-prime rows in the JSON.
    #[arg(long)]
    pub items: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TfArgs {
    #[arg(long)]
    pub function: PathBuf,
    #[arg(long, value_parser = parse_count)]
    pub limit: u64,
    /// Shift test checked for n ≤ bound.
    #[arg(long, default_value_t = 30, value_parser = parse_count)]
    pub bound: u64,
    #[arg(long)]
    pub items: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WitnessArgs {
    #[arg(long)]
    pub function: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub count: usize,
    #[arg(long, default_value_t = 1000, value_parser = parse_count)]
    pub search_limit: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConstructArgs {
    /// Prescribed exponents as `p:k` pairs, e.g. `3:1,5:3`.
    #[arg(long)]
    pub exponents: String,
    /// Number of values f(1), f(2), ... to print.
    #[arg(long, default_value_t = 30)]
    pub values: u64,
    /// Bound for the empirical check of each prescribed prime.
    #[arg(long, default_value_t = 100, value_parser = parse_count)]
    pub bound: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TupleArgs {
    /// Comma-separated rationals, e.g. `12,18` or `5/7,-3`.
    #[arg(long, allow_hyphen_values = true)]
    pub tuple: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KummerArgs {
    #[arg(long)]
    pub ell: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub tuple: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FrobeniusArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub ell: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub tuple: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub ell: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub tuple: String,
    #[arg(long, value_parser = parse_count)]
    pub limit: u64,
    /// Count primes where every entry is an ℓ-th power instead.
    #[arg(long)]
    pub split: bool,
    #[arg(long)]
    pub items: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HeuristicArgs {
    #[arg(long)]
    pub function: PathBuf,
    /// Comma-separated integers ≥ 2.
    #[arg(long)]
    pub witnesses: String,
    #[arg(long, value_parser = parse_count)]
    pub limit: u64,
    #[arg(long)]
    pub items: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    /// Evaluate the Y/Z schedule at x.
    #[arg(long)]
    pub x: Option<f64>,
    /// With `--x`: also evaluate the main bound with this b_f.
    #[arg(long, requires = "x")]
    pub b_f: Option<f64>,
    /// π(x); sieved when omitted (only up to 10⁹).
    #[arg(long, requires = "b_f", value_parser = parse_count)]
    pub pi_x: Option<u64>,
    /// Mertens product over primes in [Y, Z), given as `Y,Z`.
    #[arg(long)]
    pub mertens: Option<String>,
    /// Check Σ_{ℓ ≤ Z} log ℓ ≤ MZ at every prime up to Z.
    #[arg(long, value_parser = parse_count)]
    pub chebyshev: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiscArgs {
    /// Discriminant of the n-th cyclotomic field.
    #[arg(long, conflicts_with = "kummer_ell", required_unless_present = "kummer_ell")]
    pub cyclotomic: Option<u64>,
    /// Log bound for the Kummer field of `--tuple` over ℚ(ζ_ℓ).
    #[arg(long, requires = "tuple")]
    pub kummer_ell: Option<u64>,
    #[arg(long, allow_hyphen_values = true, requires = "kummer_ell")]
    pub tuple: Option<String>,
}

/// Accepts `1000000` as well as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 {
        Ok(x as u64)
    } else {
        Err(format!("not a nonnegative integer: {s:?}"))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Spec(String),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error(transparent)]
    Rational(#[from] RatError),
    #[error(transparent)]
    PowerMap(#[from] PowerMapError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Chebotarev(#[from] ChebotarevError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Spec(_) => EXIT_SPEC,
            _ => EXIT_DOMAIN,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Spec(_) => "function_spec",
            CliError::Modular(_) => "modular",
            CliError::Rational(_) => "rational",
            CliError::PowerMap(_) => "powermap",
            CliError::Lattice(_) => "lattice",
            CliError::Chebotarev(_) => "chebotarev",
            CliError::Bounds(_) => "bounds",
            CliError::Io(_) => "io",
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SfScan(_) => "sf-scan",
            Command::TfScan(_) => "tf-scan",
            Command::Witness(_) => "witness",
            Command::Construct(_) => "construct",
            Command::Relations(_) => "relations",
            Command::KummerDegree(_) => "kummer-degree",
            Command::Frobenius(_) => "frobenius",
            Command::DensityScan(_) => "density-scan",
            Command::Heuristic(_) => "heuristic",
            Command::Bounds(_) => "bounds",
            Command::Disc(_) => "disc",
        }
    }
}

/// Parses `argv` (program name first), runs the command, prints the report
/// on stdout and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    run_to(argv, &mut stdout.lock())
}

pub fn run_to<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = cli.global.config();
    let name = cli.command.name();
    let (text, code) = match execute(&cli) {
        Ok(text) => (text, EXIT_OK),
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
        Err(e) => (
            report::error_object(name, e.kind(), &e.to_string(), &config),
            e.exit_code(),
        ),
    };
    if writeln!(out, "{text}").is_err() {
        return EXIT_DOMAIN;
    }
    code
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let config = cli.global.config();
    config.validate()?;
    let workers = cli
        .global
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    crate::with_workers(workers, || commands::dispatch(cli, &config))
}
