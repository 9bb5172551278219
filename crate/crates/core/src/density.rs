//! Greedy construction of integers whose `σ*_{-r}` value approaches a target.
//!
//! Work in log space: `C_0 = 0`, and at step `n` take the smallest `α_n >= 1`
//! with `C_{n-1} + log(1 + p_n^{-α_n r}) <= log x`. Whenever every witness
//! inequality holds, `C_n → log x` for every `x` in `[1, ζ(r)/ζ(2r))`.

use serde::{Serialize, Serializer};

use crate::analytic::zeta_ratio;
use crate::error::{Error, Result};
use crate::gaps::{gap_for_m, GapInterval};
use crate::primes::PrimeTable;
use crate::sigma::{unitary_sigma, FactoredInteger};

/// Largest exponent tried at a single prime.
pub const MAX_EXPONENT: u32 = 10_000;

/// Relative width within which `C_{n-1}` counts as equal to `log x`.
pub const EQUALITY_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepExponent {
    Power(u32),
    Skipped,
}

impl Serialize for StepExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Power(a) => s.serialize_u32(*a),
            Self::Skipped => s.serialize_str("skipped"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedyStep {
    /// 1-based index of the prime.
    pub prime_index: usize,
    pub prime: u64,
    pub exponent: StepExponent,
    /// `C_n` after this step.
    pub partial_log: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedyTrace {
    pub r: f64,
    pub target: f64,
    pub steps: Vec<GreedyStep>,
    pub result: FactoredInteger,
    /// `σ*_{-r}(result)`.
    pub achieved: f64,
    /// `max(log target − C_final, 0)`. `C_final` may exceed `log target` by
    /// at most `1e-15 · max(1, |log target|)`.
    pub residual: f64,
    pub converged: bool,
}

impl GreedyTrace {
    pub fn final_log(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.partial_log)
    }
}

/// Smallest `α >= 1` with `c + log(1 + p^{-α r}) <= x + slack`, or `None`
/// past the cap.
fn minimal_exponent(p: u64, r: f64, c: f64, x: f64, slack: f64) -> Option<(u32, f64)> {
    let log_p = (p as f64).ln();
    let term = |a: u32| (-(a as f64) * r * log_p).exp().ln_1p();
    let fits = |a: u32| c + term(a) <= x + slack;

    // p^{-α r} <= e^{x−c} − 1 gives the starting guess
    let room = (x - c).exp_m1();
    let guess = if room > 0.0 {
        (-room.ln() / (r * log_p)).ceil()
    } else {
        f64::INFINITY
    };
    let mut a = if guess.is_finite() {
        guess.clamp(1.0, MAX_EXPONENT as f64) as u32
    } else {
        MAX_EXPONENT
    };
    while a < MAX_EXPONENT && !fits(a) {
        a += 1;
    }
    if !fits(a) {
        return None;
    }
    while a > 1 && fits(a - 1) {
        a -= 1;
    }
    Some((a, term(a)))
}

/// Runs the greedy construction toward `target` over the first `max_primes`
/// primes, stopping once the log residual drops below `eps`.
///
/// `tol` is the ζ tolerance used to check `target < ζ(r)/ζ(2r)`.
pub fn greedy_approximate(
    r: f64,
    target: f64,
    max_primes: usize,
    eps: f64,
    tol: f64,
    table: &PrimeTable,
) -> Result<GreedyTrace> {
    if !(r > 1.0) {
        return Err(Error::Domain(format!("greedy construction needs r > 1, got {r}")));
    }
    let sup = zeta_ratio(r, tol)?;
    if !(target >= 1.0 && target < sup.lo()) {
        return Err(Error::TargetOutOfRange {
            target,
            lo: 1.0,
            hi: sup.estimate,
        });
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be >= 0, got {eps}")));
    }
    table.require(max_primes)?;
    Ok(run_greedy(r, target, max_primes, eps, table))
}

pub(crate) fn run_greedy(r: f64, target: f64, max_primes: usize, eps: f64, table: &PrimeTable) -> GreedyTrace {
    let x = target.ln();
    let slack = EQUALITY_TOL * x.abs().max(1.0);
    let mut c = 0.0f64;
    let mut steps = Vec::new();
    let mut result = FactoredInteger::one();

    for (i, &p) in table.primes()[..max_primes].iter().enumerate() {
        let gap = x - c;
        if gap < eps {
            break;
        }
        if gap <= slack {
            steps.push(GreedyStep {
                prime_index: i + 1,
                prime: p,
                exponent: StepExponent::Skipped,
                partial_log: c,
            });
            break;
        }
        let exponent = match minimal_exponent(p, r, c, x, slack) {
            Some((a, term)) => {
                c += term;
                result.push(p, a);
                StepExponent::Power(a)
            }
            None => StepExponent::Skipped,
        };
        steps.push(GreedyStep {
            prime_index: i + 1,
            prime: p,
            exponent,
            partial_log: c,
        });
    }

    let residual = (x - c).max(0.0);
    GreedyTrace {
        r,
        target,
        achieved: unitary_sigma(-r, &result),
        steps,
        result,
        residual,
        converged: residual < eps || residual <= slack,
    }
}

/// Greedy run at the midpoint of a gap.
#[derive(Debug, Clone, Serialize)]
pub struct StallDemo {
    pub gap: GapInterval,
    /// `log(target / gap.lo)`: the residual can never drop below this.
    pub residual_floor: f64,
    pub stalled: bool,
    pub trace: GreedyTrace,
}

/// Targets the midpoint of `gap`; the residual stays at or above
/// `log(midpoint / gap.lo)` because no range value lies inside the gap.
pub fn greedy_stall_demo(gap: &GapInterval, max_primes: usize, tol: f64, table: &PrimeTable) -> Result<StallDemo> {
    match gap_for_m(gap.r, gap.witness_m, tol, table)? {
        Some(g) if (g.lo - gap.lo).abs() <= 1e-12 * g.lo && (g.hi - gap.hi).abs() <= 1e-12 * g.hi => {}
        _ => {
            return Err(Error::Domain(format!(
                "({}, {}) is not the gap for witness {} at r = {}",
                gap.lo, gap.hi, gap.witness_m, gap.r
            )))
        }
    }
    let target = 0.5 * (gap.lo + gap.hi);
    let trace = greedy_approximate(gap.r, target, max_primes, 0.0, tol, table)?;
    let residual_floor = (target / gap.lo).ln();
    Ok(StallDemo {
        gap: gap.clone(),
        residual_floor,
        stalled: trace.residual >= residual_floor - 1e-12,
        trace,
    })
}
