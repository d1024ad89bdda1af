//! `cmlattice`: norm bounds and exact minimal vectors on cyclotomic lattices.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmlattice::Error;

/// Exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VERIFY_FAIL: u8 = 1;
    pub const DEGENERATE: u8 = 2;
    pub const PRECISION: u8 = 3;
    pub const BUDGET: u8 = 4;
    pub const USAGE: u8 = 64;
    pub const INTERNAL: u8 = 70;
}

#[derive(Parser, Debug)]
#[command(name = "cmlattice", version, about = "Norm bounds and minimal vectors for cyclotomic CM lattices")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Conductor n of Q(zeta_n).
    #[arg(long, global = true, value_name = "N")]
    pub cyclotomic: Option<u64>,
    /// Unit-basis file (`torsion t` then one generator per line).
    #[arg(long, global = true, value_name = "FILE")]
    pub units: Option<PathBuf>,
    /// Builtin cyclotomic unit family.
    #[arg(long, global = true, value_enum, default_value_t = BasisKind::Conjugates)]
    pub basis: BasisKind,
    /// Positive rational weights, e.g. `1,1` or `3/2,1`. Default: all ones.
    #[arg(long, global = true, value_name = "CSV", allow_hyphen_values = true)]
    pub weights: Option<String>,
    /// Ideal generated by (1 - zeta)^R.
    #[arg(long, global = true, value_name = "R", conflicts_with = "ideal_gen")]
    pub ideal_exp: Option<u32>,
    /// Ideal generator in power-basis coordinates, e.g. `1,-1,0,0`.
    #[arg(long, global = true, value_name = "COORDS", allow_hyphen_values = true)]
    pub ideal_gen: Option<String>,
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128)]
    pub bits: u32,
    /// Enumeration node budget.
    #[arg(long, global = true, default_value_t = cmlattice::lattice::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 20240917)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// 1 + zeta^c, c = 1..k-1.
    Conjugates,
    /// (1 - zeta^a)/(1 - zeta), a = 2..k.
    Standard,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Norm bound over all simplices, with verdict for prime conductors.
    Bound,
    /// Minimal vectors of O_F or a principal ideal under the weighted norm.
    Minima,
    /// Bound, enumeration, factorization and circulant cross-check per r.
    VerifyCraig(VerifyArgs),
    /// Finite set E of chamber representatives.
    SetE,
    /// Theta-series prefix of an ideal lattice or a Craig circulant.
    Theta(ThetaArgs),
    /// Truncated psi on an imaginary ray, or the cusp estimate of (mu, n).
    Psi(PsiArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Prime conductor.
    #[arg(short = 'p', long = "prime")]
    pub p: u64,
    /// Exponent range `a..b` (inclusive) or a single exponent.
    #[arg(short = 'r', long = "range", default_value = "0..2")]
    pub r: String,
    /// Largest norm in the theta cross-check.
    #[arg(long, default_value = "12")]
    pub max_norm: String,
    /// Random weight vectors for the hull check (k = 2, 3 only).
    #[arg(long, default_value_t = 3)]
    pub hull_trials: usize,
}

#[derive(Args, Debug)]
pub struct ThetaArgs {
    /// Craig circulant `n,r` instead of a cyclotomic ideal.
    #[arg(long, value_name = "N,R", conflicts_with = "cyclotomic")]
    pub circulant: Option<String>,
    /// Largest norm counted.
    #[arg(long, default_value = "8")]
    pub max_norm: String,
    /// Rational factor applied to the form before counting.
    #[arg(long)]
    pub scale: Option<String>,
}

#[derive(Args, Debug)]
pub struct PsiArgs {
    /// Ray parameter t (rational).
    #[arg(long, default_value = "1")]
    pub t: String,
    /// Estimate (mu, n) from the cusp behaviour instead.
    #[arg(long)]
    pub cusp: bool,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.is::<commands::UsageError>() {
        return exit::USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::DegenerateSimplex { .. }) => exit::DEGENERATE,
        Some(Error::PrecisionExhausted(_)) => exit::PRECISION,
        Some(Error::NodeBudgetExceeded(_)) => exit::BUDGET,
        Some(
            Error::InvalidConductor { .. }
            | Error::FieldMismatch(..)
            | Error::ZeroElement
            | Error::NotDivisible
            | Error::DimensionMismatch { .. }
            | Error::Parse(_)
            | Error::NotPrime(_)
            | Error::BasisCount { .. }
            | Error::NonUnit { .. }
            | Error::DependentUnits(_)
            | Error::InvalidInput(_),
        ) => exit::USAGE,
        Some(Error::NotPositiveDefinite | Error::CuspMismatch(_)) | None => exit::INTERNAL,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
