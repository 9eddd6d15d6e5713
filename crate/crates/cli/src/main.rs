//! `oscq` command line: zeros, verification suites and asymptotic comparisons.

mod commands;
mod fail;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::fail::{Failure, EXIT_DOMAIN};

/// Default ceiling on n; larger runs need `--allow-long`.
pub const DESK_MAX_N: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "oscq", version, about = "Orthogonal polynomials for the Bessel weight J_nu on [0, inf)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeros of P_n as CSV, with a JSON manifest beside it.
    Zeros(ZerosArgs),
    /// Run an invariant suite and write a JSON report.
    Verify(VerifyArgs),
    /// Compare P~_n with the outer or inner asymptotic formula.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Args, Debug)]
pub struct ZerosArgs {
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub n: usize,
    /// Output bits, or `auto`.
    #[arg(long, default_value = "auto")]
    pub prec: PrecArg,
    /// Exclusion radius (in the z = inπw frame) for the zero-line summary.
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub allow_long: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub nu: Option<f64>,
    /// `16,32,64` or `1..10`.
    #[arg(long)]
    pub n_list: Option<String>,
    #[arg(long)]
    pub prec: Option<u32>,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Outer,
    Inner,
}

#[derive(Args, Debug)]
pub struct AsymptoticsArgs {
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub n: usize,
    /// A file of `re,im` lines, `grid`, or `grid:RE0:RE1:NRE:IM0:IM1:NIM`.
    #[arg(long)]
    pub points: String,
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    #[arg(long, default_value = "128")]
    pub prec: PrecArg,
    /// Points closer than this to [-1, 1] (outer) or to 0, ±1 (inner) are rejected.
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub allow_long: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecArg {
    Auto,
    Bits(u32),
}

impl std::str::FromStr for PrecArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(PrecArg::Auto);
        }
        match s.parse::<u32>() {
            Ok(b) if b >= 32 => Ok(PrecArg::Bits(b)),
            _ => Err(format!("expected `auto` or a bit count >= 32, got {s:?}")),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_DOMAIN as u8) } else { ExitCode::SUCCESS };
        }
    };
    let res: Result<i32, Failure> = match cli.command {
        Command::Zeros(a) => commands::zeros(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Asymptotics(a) => commands::asymptotics(&a),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("oscq: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
