//! `unisig`: unitary divisor function ranges from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

// `!(x > y)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod text;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use unisig_core::primes::DEFAULT_SIEVE_LIMIT;

#[derive(Debug, Parser)]
#[command(
    name = "unisig",
    version,
    about = "Unitary divisor functions and the topology of their ranges"
)]
pub struct Cli {
    /// Sieve bound for the prime table.
    #[arg(long, global = true, default_value_t = DEFAULT_SIEVE_LIMIT)]
    pub sieve_limit: usize,

    /// Absolute tolerance for ζ evaluations.
    #[arg(long, global = true, default_value_t = unisig_core::analytic::DEFAULT_ZETA_TOL)]
    pub zeta_tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// σ*_t(n) with its factorization and unitary divisor count.
    Sigma {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        n: u64,
    },
    /// Locate the connectivity threshold η* by bisection.
    EtaStar {
        /// Final bracket width.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Whether the closure of σ*_t(ℕ) is connected.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Run every certificate the threshold rests on.
    CertifyAll {
        /// Override the J_m grid margin (default 1/400).
        #[arg(long)]
        j_margin: Option<f64>,
        /// Override the V_2 grid margin (default 0.003).
        #[arg(long)]
        v_margin: Option<f64>,
        /// Bracket width for the η* bisection.
        #[arg(long, default_value_t = 1e-10)]
        eta_tol: f64,
    },
    /// Greedy construction of n with σ*_{-r}(n) close to a target.
    Greedy {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        target: f64,
        /// Stop once the log residual falls below this.
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long, default_value_t = 500)]
        max_primes: usize,
        /// Include every step in the output.
        #[arg(long)]
        trace: bool,
    },
    /// Explicit gaps in the range of σ*_{-r}.
    Gaps {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = unisig_core::gaps::DEFAULT_MAX_WITNESS)]
        max_m: usize,
        /// Also check each gap against all n up to this bound.
        #[arg(long)]
        verify_limit: Option<usize>,
    },
    /// Sorted distinct values σ*_{-r}(n) for n up to a limit.
    Enumerate {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        limit: usize,
        /// Write CSV values here instead of standard output.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// Start CSV output with a header line.
        #[arg(long)]
        header: bool,
    },
    /// Heuristic count of connected components of the closure of the range.
    Components {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1_000_000)]
        limit: usize,
        #[arg(long, default_value_t = unisig_core::gaps::DEFAULT_RESOLUTION)]
        resolution: f64,
        /// Cluster the enumerated values only.
        #[arg(long)]
        no_refine: bool,
    },
    /// Heuristic estimate of the smallest r with at least k components.
    InfEk {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1_000_000)]
        limit: usize,
        #[arg(long, default_value_t = unisig_core::gaps::DEFAULT_RESOLUTION)]
        resolution: f64,
        /// Lower end of the search; η* when omitted.
        #[arg(long)]
        r_lo: Option<f64>,
        #[arg(long, default_value_t = 4.0)]
        r_hi: f64,
        /// Stop once the bracket is narrower than this.
        #[arg(long, default_value_t = 1e-3)]
        r_tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code)
        }
    }
}
