use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use serde::Serialize;
use unisig_core::analytic::zeta_ratio;
use unisig_core::certify::{certify_all, classify_connectivity, find_eta_star, CertifyOptions, EtaStarResult};
use unisig_core::density::{greedy_approximate, GreedyTrace};
use unisig_core::gaps::{
    enumerate_range, estimate_components_with, estimate_inf_ek, gaps_up_to, verify_gap_empty, write_values_csv,
    ComponentOptions, GapCheck, GapInterval,
};
use unisig_core::output::{format_sig, to_json_string, MACHINE_DIGITS};
use unisig_core::sigma::{factorize, unitary_sigma};
use unisig_core::{Error, FactoredInteger, PrimeTable};

use crate::text;
use crate::{Cli, Command, Format};

pub struct CliError {
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit_code: 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit_code = match e {
            Error::Inconclusive(_) | Error::InternalInconsistency(_) => 1,
            _ => 2,
        };
        Self {
            message: e.to_string(),
            exit_code,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self {
            message: format!("i/o: {e}"),
            exit_code: 2,
        }
    }
}

type CliResult = Result<ExitCode, CliError>;

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> Result<(), CliError> {
    let out = match format {
        Format::Json => to_json_string(value).map_err(|e| CliError::usage(format!("json: {e}")))?,
        Format::Text => text(),
        Format::Csv => {
            return Err(CliError::usage(
                "csv output is only available for gaps, enumerate and components",
            ))
        }
    };
    let mut stdout = io::stdout().lock();
    closed_pipe_ok(writeln!(stdout, "{out}").and_then(|_| stdout.flush()))
}

/// A reader that stops early (`| head`) is not an error.
fn closed_pipe_ok(r: io::Result<()>) -> Result<(), CliError> {
    match r {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn emit_csv(rows: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
    let mut stdout = BufWriter::new(io::stdout().lock());
    closed_pipe_ok(rows(&mut stdout).and_then(|_| stdout.flush()))
}

fn sig17(x: f64) -> String {
    format_sig(x, MACHINE_DIGITS)
}

pub fn run(cli: &Cli) -> CliResult {
    if !(cli.zeta_tol > 0.0) {
        return Err(CliError::usage(format!(
            "--zeta-tol must be positive, got {}",
            cli.zeta_tol
        )));
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    }
    let table = PrimeTable::new(cli.sieve_limit)?;
    let tol = cli.zeta_tol;
    let format = cli.format;

    match &cli.command {
        Command::Sigma { t, n } => sigma(format, *t, *n, &table),
        Command::EtaStar { tol: bracket } => eta_star(format, *bracket, &table),
        Command::Classify { t } => {
            let c = classify_connectivity(*t, tol, &table)?;
            emit(format, &c, || text::classification(&c))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CertifyAll {
            j_margin,
            v_margin,
            eta_tol,
        } => {
            let mut options = CertifyOptions {
                eta_tol: *eta_tol,
                zeta_tol: tol,
                ..CertifyOptions::default()
            };
            if let Some(m) = j_margin {
                options.slope_margin = *m;
            }
            if let Some(m) = v_margin {
                options.gap_margin = *m;
            }
            let report = certify_all(&options, &table)?;
            for f in &report.failures {
                eprintln!("FAILED: {f}");
            }
            emit(format, &report, || text::certification(&report))?;
            Ok(if report.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Greedy {
            r,
            target,
            eps,
            max_primes,
            trace,
        } => greedy(format, *r, *target, *eps, *max_primes, *trace, tol, &table),
        Command::Gaps { r, max_m, verify_limit } => gaps(format, *r, *max_m, *verify_limit, tol, &table),
        Command::Enumerate { r, limit, out, header } => {
            let values = enumerate_range(*r, *limit, &table)?;
            if let Some(path) = out {
                write_values_csv(&values, *header, BufWriter::new(File::create(path)?))?;
                let summary = EnumerateSummary {
                    r: *r,
                    limit: *limit,
                    count: values.len(),
                    path: path.display().to_string(),
                };
                let format = if format == Format::Csv { Format::Text } else { format };
                emit(format, &summary, || text::enumerate_summary(&summary))?;
            } else if format == Format::Json {
                let doc = EnumerateOutput {
                    r: *r,
                    limit: *limit,
                    count: values.len(),
                    values,
                };
                emit(format, &doc, String::new)?;
            } else {
                emit_csv(|w| write_values_csv(&values, *header, w))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Components {
            r,
            limit,
            resolution,
            no_refine,
        } => {
            let options = ComponentOptions {
                resolution: *resolution,
                refine: !no_refine,
                zeta_tol: tol,
                ..ComponentOptions::default()
            };
            let report = estimate_components_with(*r, *limit, &options, &table)?;
            if format == Format::Csv {
                emit_csv(|w| {
                    writeln!(w, "min,max,count")?;
                    for c in &report.clusters {
                        writeln!(w, "{},{},{}", sig17(c.min), sig17(c.max), c.count)?;
                    }
                    Ok(())
                })?;
            } else {
                emit(format, &report, || text::components(&report))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::InfEk {
            k,
            limit,
            resolution,
            r_lo,
            r_hi,
            r_tol,
        } => {
            let lo = match r_lo {
                Some(v) => *v,
                None => find_eta_star(1e-10, &table)?.value,
            };
            let options = ComponentOptions {
                resolution: *resolution,
                zeta_tol: tol,
                ..ComponentOptions::default()
            };
            let est = estimate_inf_ek(*k, *limit, lo, *r_hi, *r_tol, &options, &table)?;
            if let (Some(w), false) = (&est.warning, format == Format::Text) {
                eprintln!("warning: {w}");
            }
            emit(format, &est, || text::inf_ek(&est))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Serialize)]
pub struct SigmaOutput {
    pub t: f64,
    pub n: u64,
    pub value: f64,
    pub factorization: String,
    pub factors: FactoredInteger,
    pub unitary_divisor_count: u64,
}

fn sigma(format: Format, t: f64, n: u64, table: &PrimeTable) -> CliResult {
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    if !t.is_finite() {
        return Err(CliError::usage(format!("--t must be finite, got {t}")));
    }
    let factors = factorize(n, table)?;
    let out = SigmaOutput {
        t,
        n,
        value: unitary_sigma(t, &factors),
        factorization: factors.to_string(),
        unitary_divisor_count: 1u64 << factors.omega(),
        factors,
    };
    emit(format, &out, || text::sigma(&out))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
pub struct EtaStarOutput {
    pub tol: f64,
    #[serde(flatten)]
    pub result: EtaStarResult,
}

fn eta_star(format: Format, tol: f64, table: &PrimeTable) -> CliResult {
    let out = EtaStarOutput {
        tol,
        result: find_eta_star(tol, table)?,
    };
    emit(format, &out, || text::eta_star(&out))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
pub struct StallInfo {
    pub gap: GapInterval,
    /// `log(target / gap.lo)`.
    pub residual_floor: f64,
    pub stalled: bool,
}

#[derive(Serialize)]
pub struct GreedyOutput {
    pub r: f64,
    pub target: f64,
    pub eps: f64,
    pub max_primes: usize,
    pub result: FactoredInteger,
    pub achieved: f64,
    pub residual: f64,
    pub converged: bool,
    pub steps_taken: usize,
    pub stall: Option<StallInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<GreedyTrace>,
}

#[allow(clippy::too_many_arguments)]
fn greedy(
    format: Format,
    r: f64,
    target: f64,
    eps: f64,
    max_primes: usize,
    with_trace: bool,
    tol: f64,
    table: &PrimeTable,
) -> CliResult {
    if r > 1.0 && target.is_finite() {
        let sup = zeta_ratio(r, tol)?;
        if !(target >= 1.0 && target < sup.lo()) {
            return Err(CliError::usage(format!(
                "target {target} outside [1, {}) at r = {r}",
                format_sig(sup.estimate, 7)
            )));
        }
    }
    let trace = greedy_approximate(r, target, max_primes, eps, tol, table)?;
    let stall = gaps_up_to(r, unisig_core::gaps::DEFAULT_MAX_WITNESS, tol, table)?
        .into_iter()
        .find(|g| g.contains(target))
        .map(|gap| {
            let residual_floor = (target / gap.lo).ln();
            StallInfo {
                stalled: trace.residual >= residual_floor - 1e-12,
                residual_floor,
                gap,
            }
        });
    let out = GreedyOutput {
        r,
        target,
        eps,
        max_primes,
        result: trace.result.clone(),
        achieved: trace.achieved,
        residual: trace.residual,
        converged: trace.converged,
        steps_taken: trace.steps.len(),
        stall,
        trace: with_trace.then_some(trace),
    };
    emit(format, &out, || text::greedy(&out))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
pub struct GapsOutput {
    pub r: f64,
    pub max_m: usize,
    pub gaps: Vec<GapInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<GapCheck>>,
}

fn gaps(format: Format, r: f64, max_m: usize, verify_limit: Option<usize>, tol: f64, table: &PrimeTable) -> CliResult {
    if max_m == 0 {
        return Err(CliError::usage("--max-m must be at least 1"));
    }
    let gaps = gaps_up_to(r, max_m, tol, table)?;
    let checks = match verify_limit {
        Some(limit) => Some(
            gaps.iter()
                .map(|g| verify_gap_empty(r, g, limit, table))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let out = GapsOutput { r, max_m, gaps, checks };
    if format == Format::Csv {
        emit_csv(|w| {
            writeln!(w, "witness_m,lo,hi")?;
            for g in &out.gaps {
                writeln!(w, "{},{},{}", g.witness_m, sig17(g.lo), sig17(g.hi))?;
            }
            Ok(())
        })?;
    } else {
        emit(format, &out, || text::gaps(&out))?;
    }
    let all_empty = out.checks.as_ref().is_none_or(|c| c.iter().all(|c| c.empty));
    if !all_empty {
        eprintln!("a gap contains enumerated values");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
pub struct EnumerateOutput {
    pub r: f64,
    pub limit: usize,
    pub count: usize,
    pub values: Vec<f64>,
}

#[derive(Serialize)]
pub struct EnumerateSummary {
    pub r: f64,
    pub limit: usize,
    pub count: usize,
    pub path: String,
}
