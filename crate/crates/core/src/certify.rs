//! Numerical verification of the connectivity threshold.
//!
//! For `1 < r <= 3` the closure of `σ*_{-r}(ℕ)` is an interval iff
//! `V_m(r) <= 0` for the six witnesses `m ∈ {1, 2, 3, 4, 6, 9}`; every other
//! `m` follows from monotonicity of `F(m, r)` in `m`. Grid certificates show
//! `V_m` increasing on `[1, 2]` and `V_2 > 0` on `[2, 3]`; the unique zero of
//! `V_2` is `η*`. Beyond 3 the first witness alone decides.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{
    gap_margin, slope_surrogate, slope_surrogate_derivative, slope_surrogate_head_derivative, zeta_ratio,
    zeta_ratio_excess_scaled, DEFAULT_ZETA_TOL,
};
use crate::bounded::BoundedValue;
use crate::error::{Error, Result};
use crate::primes::{ratio_exceptions, rosser_sweep, PrimeTable, RosserSweep};

/// Witness indices that decide connectivity for `r ∈ (1, 3]`.
pub const CRITICAL_WITNESSES: [usize; 6] = [1, 2, 3, 4, 6, 9];

/// Margin required of `J_m` on the `[1, 2]` grid.
pub const SLOPE_MARGIN: f64 = 1.0 / 400.0;
/// Lower bound on `∂J_m/∂r` over `[1, 2]` (as a magnitude).
pub const SLOPE_DERIVATIVE_BOUND: f64 = 7.0;
pub const SLOPE_GRID_POINTS: usize = 2801;

/// Margin required of `V_2` on the `[2, 3]` grid.
pub const GAP_MARGIN: f64 = 0.003;
pub const GAP_DERIVATIVE_BOUND: f64 = 1.1;
pub const GAP_GRID_POINTS: usize = 401;

/// The `p_m` term of `∂J_m/∂r` stays above this on `[1, 2]`.
pub const HEAD_DERIVATIVE_FLOOR: f64 = -1.0;

/// Initial bisection bracket for `η*`.
pub const ETA_BRACKET: (f64, f64) = (1.5, 2.0);
/// Tolerance for the ζ evaluations inside the `η*` bisection.
pub const ETA_ZETA_TOL: f64 = 1e-13;
/// Finest bracket width the bisection accepts.
pub const MIN_ETA_TOL: f64 = 1e-13;

/// Reference value of the threshold, to seven decimals.
pub const ETA_STAR_REFERENCE: f64 = 1.974_255_0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertifiedFunction {
    /// `J_m > 0` on `[1, 2]`, hence `V_m` increasing there.
    #[serde(rename = "J_m_positive")]
    SlopeSurrogate,
    /// `V_2 > 0` on `[2, 3]`, hence a gap for every such `r`.
    #[serde(rename = "V_2_positive")]
    GapMargin,
}

/// Positivity on an interval from grid values and a derivative lower bound:
/// if `f(x_k) > margin` at every grid point and `f' > −slope_bound`, then
/// `f > margin − slope_bound · spacing >= 0` everywhere.
#[derive(Debug, Clone, Serialize)]
pub struct GridCertificate {
    pub function_id: CertifiedFunction,
    pub m: Option<usize>,
    pub interval: [f64; 2],
    pub grid_points: usize,
    pub margin: f64,
    pub slope_bound: f64,
    /// `margin − slope_bound · spacing`; must be `>= 0`.
    pub residual: f64,
    pub min_observed: f64,
    pub argmin: f64,
    /// Largest evaluation error bound seen on the grid.
    pub max_error_bound: f64,
    pub verdict: bool,
}

impl GridCertificate {
    pub fn spacing(&self) -> f64 {
        (self.interval[1] - self.interval[0]) / (self.grid_points - 1) as f64
    }
}

/// `lo + k (hi − lo)/(n − 1)`, `k = 0..n`.
pub fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let steps = (points - 1) as f64;
    (0..points).map(|k| lo + (hi - lo) * k as f64 / steps).collect()
}

#[allow(clippy::too_many_arguments)]
fn certify_on_grid<F>(
    function_id: CertifiedFunction,
    m: Option<usize>,
    lo: f64,
    hi: f64,
    points: usize,
    margin: f64,
    slope_bound: f64,
    eval: F,
) -> Result<GridCertificate>
where
    F: Fn(f64) -> Result<BoundedValue> + Sync,
{
    if points < 2 || !(hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "grid needs >= 2 points on a nonempty interval, got {points} on [{lo}, {hi}]"
        )));
    }
    let xs = grid(lo, hi, points);
    let values: Vec<BoundedValue> = xs.par_iter().map(|&x| eval(x)).collect::<Result<_>>()?;

    // fixed ascending order keeps the certificate bit-reproducible
    let mut min_observed = f64::INFINITY;
    let mut argmin = lo;
    let mut worst_lower = f64::INFINITY;
    let mut max_error_bound = 0.0f64;
    for (&x, v) in xs.iter().zip(&values) {
        if v.estimate < min_observed {
            min_observed = v.estimate;
            argmin = x;
        }
        worst_lower = worst_lower.min(v.lo());
        max_error_bound = max_error_bound.max(v.error_bound);
    }
    let spacing = (hi - lo) / (points - 1) as f64;
    let residual = margin - slope_bound * spacing;
    Ok(GridCertificate {
        function_id,
        m,
        interval: [lo, hi],
        grid_points: points,
        margin,
        slope_bound,
        residual,
        min_observed,
        argmin,
        max_error_bound,
        verdict: worst_lower > margin && residual >= 0.0,
    })
}

fn check_witness(m: usize) -> Result<()> {
    if CRITICAL_WITNESSES.contains(&m) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "m must be one of {CRITICAL_WITNESSES:?}, got {m}"
        )))
    }
}

/// `J_m > 1/400` on the 2801-point grid of `[1, 2]`.
pub fn certify_slope_positive(m: usize, table: &PrimeTable) -> Result<GridCertificate> {
    certify_slope_positive_with_margin(m, SLOPE_MARGIN, table)
}

/// As [`certify_slope_positive`] with a caller-chosen margin.
pub fn certify_slope_positive_with_margin(m: usize, margin: f64, table: &PrimeTable) -> Result<GridCertificate> {
    check_witness(m)?;
    certify_on_grid(
        CertifiedFunction::SlopeSurrogate,
        Some(m),
        1.0,
        2.0,
        SLOPE_GRID_POINTS,
        margin,
        SLOPE_DERIVATIVE_BOUND,
        |r| Ok(BoundedValue::rounded(slope_surrogate(m, r, table)?, 32.0)),
    )
}

/// `V_2 > 0.003` on the 401-point grid of `[2, 3]`.
pub fn certify_gap_margin_on_2_3(tol: f64, table: &PrimeTable) -> Result<GridCertificate> {
    certify_gap_margin_with_margin(GAP_MARGIN, tol, table)
}

pub fn certify_gap_margin_with_margin(margin: f64, tol: f64, table: &PrimeTable) -> Result<GridCertificate> {
    certify_on_grid(
        CertifiedFunction::GapMargin,
        Some(2),
        2.0,
        3.0,
        GAP_GRID_POINTS,
        margin,
        GAP_DERIVATIVE_BOUND,
        |r| gap_margin(2, r, tol, table),
    )
}

/// Minimum over the `[1, 2]` grid of a derivative term, for the bounds the
/// slope certificate takes as input.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeCheck {
    pub m: usize,
    pub floor: f64,
    pub min_observed: f64,
    pub argmin: f64,
    pub passed: bool,
}

fn derivative_check<F>(m: usize, floor: f64, f: F) -> Result<DerivativeCheck>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut min_observed = f64::INFINITY;
    let mut argmin = 1.0;
    for r in grid(1.0, 2.0, SLOPE_GRID_POINTS) {
        let v = f(r)?;
        if v < min_observed {
            min_observed = v;
            argmin = r;
        }
    }
    Ok(DerivativeCheck {
        m,
        floor,
        min_observed,
        argmin,
        passed: min_observed >= floor,
    })
}

/// The `p_m` term of `∂J_m/∂r` is `>= −1` at every grid point.
pub fn check_head_derivative(m: usize, table: &PrimeTable) -> Result<DerivativeCheck> {
    check_witness(m)?;
    derivative_check(m, HEAD_DERIVATIVE_FLOOR, |r| {
        slope_surrogate_head_derivative(m, r, table)
    })
}

/// `∂J_m/∂r > −7` at every grid point.
pub fn check_slope_derivative(m: usize, table: &PrimeTable) -> Result<DerivativeCheck> {
    check_witness(m)?;
    let mut c = derivative_check(m, -SLOPE_DERIVATIVE_BOUND, |r| slope_surrogate_derivative(m, r, table))?;
    c.passed = c.min_observed > -SLOPE_DERIVATIVE_BOUND;
    Ok(c)
}

#[derive(Debug, Clone, Serialize)]
pub struct EtaStarResult {
    pub value: f64,
    pub bracket: [f64; 2],
    pub iterations: u32,
    /// `|(2^η+1)/2^η · (3^η+1)^2/(3^{2η}+1) − ζ(η)/ζ(2η)|` at `value`.
    pub equation_residual: f64,
    /// `V_2` at the final bracket ends.
    pub margins: [f64; 2],
    /// Midpoints whose `V_2` sign was within its error bound.
    pub ambiguous_steps: u32,
}

/// Bisection for the zero of `V_2` in `[1.5, 2]`, stopping once the bracket is
/// at most `tol` wide. The reported value is the secant point of the final
/// bracket.
pub fn find_eta_star(tol: f64, table: &PrimeTable) -> Result<EtaStarResult> {
    if !(tol >= MIN_ETA_TOL) {
        return Err(Error::InvalidArgument(format!(
            "bisection tolerance must be >= {MIN_ETA_TOL:e}, got {tol}"
        )));
    }
    let v = |r: f64| gap_margin(2, r, ETA_ZETA_TOL, table);
    let (mut lo, mut hi) = ETA_BRACKET;
    let mut v_lo = v(lo)?;
    let mut v_hi = v(hi)?;
    if !v_lo.is_certainly_negative() || !v_hi.is_certainly_positive() {
        return Err(Error::InternalInconsistency(format!(
            "V_2 does not change sign on [{lo}, {hi}]: {} and {}",
            v_lo.estimate, v_hi.estimate
        )));
    }
    let mut iterations = 0;
    let mut ambiguous_steps = 0;
    while hi - lo > tol && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let vm = v(mid)?;
        if !vm.is_certainly_negative() && !vm.is_certainly_positive() {
            ambiguous_steps += 1;
        }
        if vm.estimate < 0.0 {
            lo = mid;
            v_lo = vm;
        } else {
            hi = mid;
            v_hi = vm;
        }
        iterations += 1;
    }
    // secant point of the final bracket; stays inside it
    let value = if v_hi.estimate > v_lo.estimate {
        (lo - v_lo.estimate * (hi - lo) / (v_hi.estimate - v_lo.estimate)).clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    };
    Ok(EtaStarResult {
        value,
        bracket: [lo, hi],
        iterations,
        equation_residual: threshold_equation_residual(value)?,
        margins: [v_lo.estimate, v_hi.estimate],
        ambiguous_steps,
    })
}

/// `|(2^η+1)/2^η · (3^η+1)^2/(3^{2η}+1) − ζ(η)/ζ(2η)|`.
pub fn threshold_equation_residual(eta: f64) -> Result<f64> {
    let two = 2f64.powf(eta);
    let three = 3f64.powf(eta);
    let lhs = (two + 1.0) / two * (three + 1.0).powi(2) / (three * three + 1.0);
    let rhs = zeta_ratio(eta, ETA_ZETA_TOL)?;
    Ok((lhs - rhs.estimate).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityStatus {
    Holds,
    Fails,
    Inconclusive,
}

impl From<&BoundedValue> for InequalityStatus {
    fn from(v: &BoundedValue) -> Self {
        if v.is_certainly_negative() {
            Self::Holds
        } else if v.is_certainly_positive() {
            Self::Fails
        } else {
            Self::Inconclusive
        }
    }
}

/// Status of `(p_m^{2r}+p_m^r)/(p_m^{2r}+1) <= Π_{i>m}(1+p_i^{-r})`, i.e. of
/// `V_m(r) <= 0`, for each critical witness.
pub fn check_finite_inequalities(r: f64, tol: f64, table: &PrimeTable) -> Result<BTreeMap<usize, InequalityStatus>> {
    if !(r > 1.0 && r <= 3.0) {
        return Err(Error::Domain(format!(
            "the six-witness reduction covers 1 < r <= 3, got {r}"
        )));
    }
    CRITICAL_WITNESSES
        .iter()
        .map(|&m| Ok((m, InequalityStatus::from(&gap_margin(m, r, tol, table)?))))
        .collect()
}

/// `2^r (F(1, r) − ζ(r)/ζ(2r))`, positive for every `r > 3`.
///
/// Both terms are scaled by `2^r` so the comparison stays resolvable when
/// `F(1, r)` and the ratio agree to more digits than an `f64` holds.
pub fn leading_witness_margin(r: f64, tol: f64) -> Result<BoundedValue> {
    if !(r > 3.0) {
        return Err(Error::Domain(format!("leading witness check is for r > 3, got {r}")));
    }
    // 2^r (F(1, r) − 1) = 2 / (1 + 4^{-r})
    let inv_4r = 4f64.powf(-r);
    let lhs = BoundedValue::rounded(2.0 / (1.0 + inv_4r), 2.0);
    Ok(lhs - zeta_ratio_excess_scaled(r, tol)?)
}

/// `F(1, r) > ζ(r)/ζ(2r)` beyond the error bound. `false` means the check
/// could not confirm it, which would indicate a numerical defect.
pub fn check_r_gt_3(r: f64, tol: f64) -> Result<bool> {
    Ok(leading_witness_margin(r, tol)?.is_certainly_positive())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    Connected,
    Disconnected,
    Inconclusive,
}

impl std::fmt::Display for Connectivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Connected => "connected",
            Self::Disconnected => "disconnected",
            Self::Inconclusive => "inconclusive",
        })
    }
}

/// Which argument decided a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationRule {
    /// `t >= 0`: the range is discrete.
    NonNegativeExponent,
    /// `-1 <= t < 0`: the closure is `[1, ∞)`.
    HarmonicRegime,
    /// `1 < r <= 3`: the six witness inequalities.
    FiniteInequalities,
    /// `r > 3`: `F(1, r) > ζ(r)/ζ(2r)`.
    LeadingWitness,
    NotFinite,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub t: f64,
    pub verdict: Connectivity,
    pub rule: ClassificationRule,
    /// Per-witness statuses for the finite-inequality rule.
    pub inequalities: Option<BTreeMap<usize, InequalityStatus>>,
    /// Scaled leading-witness margin for `r > 3`.
    pub leading_margin: Option<BoundedValue>,
}

/// Whether the closure of `σ*_t(ℕ)` is connected.
///
/// `r = −t = η*` counts as connected; numerically it shows up as
/// `Inconclusive` when `|r − η*|` is below the resolution of `V_2`.
pub fn classify_connectivity(t: f64, tol: f64, table: &PrimeTable) -> Result<Classification> {
    let mut out = Classification {
        t,
        verdict: Connectivity::Inconclusive,
        rule: ClassificationRule::NotFinite,
        inequalities: None,
        leading_margin: None,
    };
    if !t.is_finite() {
        return Ok(out);
    }
    if t >= 0.0 {
        out.verdict = Connectivity::Disconnected;
        out.rule = ClassificationRule::NonNegativeExponent;
        return Ok(out);
    }
    let r = -t;
    if r <= 1.0 {
        out.verdict = Connectivity::Connected;
        out.rule = ClassificationRule::HarmonicRegime;
        return Ok(out);
    }
    if r <= 3.0 {
        let statuses = check_finite_inequalities(r, tol, table)?;
        let fails = statuses.values().any(|&s| s == InequalityStatus::Fails);
        let unsure = statuses.values().any(|&s| s == InequalityStatus::Inconclusive);
        out.verdict = if fails {
            Connectivity::Disconnected
        } else if unsure {
            Connectivity::Inconclusive
        } else {
            Connectivity::Connected
        };
        out.rule = ClassificationRule::FiniteInequalities;
        out.inequalities = Some(statuses);
        return Ok(out);
    }
    let margin = leading_witness_margin(r, tol)?;
    out.rule = ClassificationRule::LeadingWitness;
    out.verdict = if margin.is_certainly_positive() {
        Connectivity::Disconnected
    } else {
        Connectivity::Inconclusive
    };
    out.leading_margin = Some(margin);
    Ok(out)
}

/// Knobs for [`certify_all`]. Defaults reproduce the published margins.
#[derive(Debug, Clone, Serialize)]
pub struct CertifyOptions {
    pub slope_margin: f64,
    pub gap_margin: f64,
    pub eta_tol: f64,
    pub zeta_tol: f64,
    pub ratio_max_j: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            slope_margin: SLOPE_MARGIN,
            gap_margin: GAP_MARGIN,
            eta_tol: 1e-10,
            zeta_tol: DEFAULT_ZETA_TOL,
            ratio_max_j: 3099,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimeRatioCheck {
    pub max_j: usize,
    pub exceptions: BTreeSet<usize>,
    pub expected: BTreeSet<usize>,
    pub bound_sweep: RosserSweep,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeadingWitnessCheck {
    pub r: f64,
    pub scaled_margin: BoundedValue,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub slope_certificates: Vec<GridCertificate>,
    pub head_derivative_checks: Vec<DerivativeCheck>,
    pub slope_derivative_checks: Vec<DerivativeCheck>,
    pub gap_certificate: GridCertificate,
    pub witness_margins_at_2: BTreeMap<usize, BoundedValue>,
    pub bracket_margins: [BoundedValue; 2],
    pub prime_ratios: PrimeRatioCheck,
    pub leading_witness: Vec<LeadingWitnessCheck>,
    pub eta_star: EtaStarResult,
    pub failures: Vec<String>,
    pub all_passed: bool,
}

/// Sample points for the `r > 3` closing inequality.
pub const LEADING_WITNESS_SAMPLES: [f64; 6] = [3.01, 3.5, 4.0, 5.0, 10.0, 50.0];

/// Runs every verification the threshold rests on and collects the results.
pub fn certify_all(options: &CertifyOptions, table: &PrimeTable) -> Result<CertificationReport> {
    let mut failures = Vec::new();

    let mut slope_certificates = Vec::new();
    let mut head_derivative_checks = Vec::new();
    let mut slope_derivative_checks = Vec::new();
    for m in CRITICAL_WITNESSES {
        let c = certify_slope_positive_with_margin(m, options.slope_margin, table)?;
        if !c.verdict {
            failures.push(format!("J_{m} grid certificate on [1, 2]"));
        }
        slope_certificates.push(c);
        let h = check_head_derivative(m, table)?;
        if !h.passed {
            failures.push(format!("J_{m} head derivative >= -1"));
        }
        head_derivative_checks.push(h);
        let d = check_slope_derivative(m, table)?;
        if !d.passed {
            failures.push(format!("J_{m} derivative > -7"));
        }
        slope_derivative_checks.push(d);
    }

    let gap_certificate = certify_gap_margin_with_margin(options.gap_margin, options.zeta_tol, table)?;
    if !gap_certificate.verdict {
        failures.push("V_2 grid certificate on [2, 3]".into());
    }

    let mut witness_margins_at_2 = BTreeMap::new();
    for m in CRITICAL_WITNESSES {
        let v = gap_margin(m, 2.0, options.zeta_tol, table)?;
        let ok = if m == 2 {
            v.is_certainly_positive()
        } else {
            v.is_certainly_negative()
        };
        if !ok {
            failures.push(format!("sign of V_{m}(2)"));
        }
        witness_margins_at_2.insert(m, v);
    }
    let bracket_margins = [
        gap_margin(2, ETA_BRACKET.0, options.zeta_tol, table)?,
        gap_margin(2, ETA_BRACKET.1, options.zeta_tol, table)?,
    ];
    if !bracket_margins[0].is_certainly_negative() || !bracket_margins[1].is_certainly_positive() {
        failures.push("V_2(1.5) < 0 < V_2(2)".into());
    }

    let exceptions = ratio_exceptions(table, options.ratio_max_j)?;
    let expected: BTreeSet<usize> = CRITICAL_WITNESSES.into_iter().collect();
    let bound_sweep = rosser_sweep(3100, 10_000_000, 50)?;
    let ratios_ok = exceptions == expected && bound_sweep.below_cube_root_two && bound_sweep.decreasing;
    if !ratios_ok {
        failures.push("consecutive prime ratios".into());
    }
    let prime_ratios = PrimeRatioCheck {
        max_j: options.ratio_max_j,
        exceptions,
        expected,
        bound_sweep,
        passed: ratios_ok,
    };

    let mut leading_witness = Vec::new();
    for r in LEADING_WITNESS_SAMPLES {
        let scaled_margin = leading_witness_margin(r, options.zeta_tol)?;
        let passed = scaled_margin.is_certainly_positive();
        if !passed {
            failures.push(format!("F(1, {r}) > ζ({r})/ζ({})", 2.0 * r));
        }
        leading_witness.push(LeadingWitnessCheck {
            r,
            scaled_margin,
            passed,
        });
    }

    let eta_star = find_eta_star(options.eta_tol, table)?;
    if eta_star.equation_residual >= 1e-9 {
        failures.push("threshold equation residual".into());
    }

    let all_passed = failures.is_empty();
    Ok(CertificationReport {
        slope_certificates,
        head_derivative_checks,
        slope_derivative_checks,
        gap_certificate,
        witness_margins_at_2,
        bracket_margins,
        prime_ratios,
        leading_witness,
        eta_star,
        failures,
        all_passed,
    })
}
