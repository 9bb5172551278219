//! Explicit gaps in the range of `σ*_{-r}` and brute-force views of the range.
//!
//! When `V_m(r) > 0` no value lies in
//! `(ζ(r)/ζ(2r) · (p_m^{2r}+1)/(p_m^{2r}+p_m^r), P_m(r))`: any `n` either
//! contains some `p_i`, `i <= m`, with exponent >= 2 (value at most the lower
//! end) or is divisible by all of `p_1, …, p_m` exactly once (value at least
//! `P_m`). The component estimators here are heuristic.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{finite_euler_product, gap_margin, unitary_gap_factor, zeta_ratio};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// Relative tolerance under which two enumerated values count as one.
pub const DEDUP_REL_TOL: f64 = 1e-13;
/// Distance kept from each gap endpoint when checking emptiness.
pub const GAP_GUARD: f64 = 1e-9;
/// Default cluster resolution for component estimates.
pub const DEFAULT_RESOLUTION: f64 = 1e-3;
/// Witnesses scanned for analytic gaps.
pub const DEFAULT_MAX_WITNESS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapInterval {
    pub r: f64,
    pub witness_m: usize,
    pub lo: f64,
    pub hi: f64,
}

impl GapInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("gaps exist only for finite r > 1, got {r}")))
    }
}

/// The gap at witness `m`, or `None` when `V_m(r) < 0`.
///
/// Errors as inconclusive when `|V_m(r)|` is within its error bound.
pub fn gap_for_m(r: f64, m: usize, tol: f64, table: &PrimeTable) -> Result<Option<GapInterval>> {
    check_r(r)?;
    let v = gap_margin(m, r, tol, table)?;
    if v.is_certainly_negative() {
        return Ok(None);
    }
    if !v.is_certainly_positive() {
        return Err(Error::Inconclusive(format!(
            "V_{m}({r}) = {:e} ± {:e}",
            v.estimate, v.error_bound
        )));
    }
    let ratio = zeta_ratio(r, tol)?;
    let p = table.nth_prime(m)?;
    // ζ(r)/ζ(2r) · Π_{i>m}(1+p_i^{-r})^{-1} telescopes to P_m
    Ok(Some(GapInterval {
        r,
        witness_m: m,
        lo: ratio.estimate * unitary_gap_factor(p, r),
        hi: finite_euler_product(m, r, table)?,
    }))
}

/// All gaps with witness `m <= max_m`, ascending in `m`.
///
/// Witnesses whose sign is inconclusive are skipped.
pub fn gaps_up_to(r: f64, max_m: usize, tol: f64, table: &PrimeTable) -> Result<Vec<GapInterval>> {
    check_r(r)?;
    let mut out = Vec::new();
    for m in 1..=max_m {
        match gap_for_m(r, m, tol, table) {
            Ok(Some(g)) => out.push(g),
            Ok(None) | Err(Error::Inconclusive(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// `σ*_{-r}(n)` from the smallest-factor table; `n <= table.limit()`.
fn sigma_from_table(n: usize, r: f64, table: &PrimeTable) -> f64 {
    let mut n = n;
    let mut value = 1.0;
    while let Some(p) = table.smallest_factor(n) {
        let mut pa = 1usize;
        while n.is_multiple_of(p as usize) {
            n /= p as usize;
            pa *= p as usize;
        }
        value *= 1.0 + (pa as f64).powf(-r);
    }
    value
}

/// `σ*_{-r}(n)` for `1 <= n <= limit`, in order of `n`.
pub fn range_values(r: f64, limit: usize, table: &PrimeTable) -> Result<Vec<f64>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("enumeration needs finite r > 0, got {r}")));
    }
    if limit > table.limit() {
        return Err(Error::NeedsLargerTable {
            value: limit as u64,
            limit: table.limit(),
        });
    }
    Ok((1..=limit)
        .into_par_iter()
        .map(|n| sigma_from_table(n, r, table))
        .collect())
}

/// Sorted distinct values of `σ*_{-r}(n)` for `1 <= n <= limit`; values within
/// relative `1e-13` of their predecessor are dropped.
pub fn enumerate_range(r: f64, limit: usize, table: &PrimeTable) -> Result<Vec<f64>> {
    let mut values = range_values(r, limit, table)?;
    values.par_sort_unstable_by(f64::total_cmp);
    values.dedup_by(|b, a| *b - *a <= DEDUP_REL_TOL * a.abs());
    Ok(values)
}

#[derive(Debug, Clone, Serialize)]
pub struct GapCheck {
    pub gap: GapInterval,
    pub limit: usize,
    /// Distinct values examined.
    pub checked: usize,
    /// Values strictly inside the guarded gap.
    pub inside: usize,
    pub empty: bool,
}

/// Brute-force check that no `σ*_{-r}(n)`, `n <= limit`, lies in
/// `(gap.lo + 1e-9, gap.hi − 1e-9)`.
pub fn verify_gap_empty(r: f64, gap: &GapInterval, limit: usize, table: &PrimeTable) -> Result<GapCheck> {
    if gap.r != r {
        return Err(Error::InvalidArgument(format!(
            "gap computed at r = {} checked at r = {r}",
            gap.r
        )));
    }
    let values = enumerate_range(r, limit, table)?;
    let (lo, hi) = (gap.lo + GAP_GUARD, gap.hi - GAP_GUARD);
    let start = values.partition_point(|&v| v <= lo);
    let end = values.partition_point(|&v| v < hi);
    let inside = end.saturating_sub(start);
    Ok(GapCheck {
        gap: gap.clone(),
        limit,
        checked: values.len(),
        inside,
        empty: inside == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cluster {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Splits sorted values wherever neighbours differ by more than `resolution`.
pub fn cluster_values(sorted: &[f64], resolution: f64) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some(c) if v - c.max <= resolution => {
                c.max = v;
                c.count += 1;
            }
            _ => out.push(Cluster {
                min: v,
                max: v,
                count: 1,
            }),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentOptions {
    pub resolution: f64,
    /// Try to bridge each break with greedy-constructed range values.
    pub refine: bool,
    pub max_witness: usize,
    pub zeta_tol: f64,
    /// Cap on greedy runs spent refining one estimate.
    pub max_greedy_runs: usize,
}

impl Default for ComponentOptions {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            refine: true,
            max_witness: DEFAULT_MAX_WITNESS,
            zeta_tol: crate::analytic::DEFAULT_ZETA_TOL,
            max_greedy_runs: 100_000,
        }
    }
}

/// Heuristic count of connected components of the closure of the range.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub r: f64,
    pub enumeration_limit: usize,
    pub resolution: f64,
    pub estimated_components: usize,
    pub analytic_gaps: Vec<GapInterval>,
    /// Clusters after merging bridged breaks; ascending and disjoint.
    pub clusters: Vec<Cluster>,
    /// Clusters of the enumerated values alone.
    pub raw_cluster_count: usize,
    /// Breaks between raw clusters that greedy values bridged.
    pub bridged_breaks: usize,
    pub greedy_runs: usize,
    /// Every analytic gap wider than the resolution falls between clusters.
    pub gaps_between_clusters: bool,
    pub heuristic: bool,
}

/// Bridges `(a, b)` with greedy values spaced at most `resolution` apart.
struct Bridge<'a> {
    r: f64,
    resolution: f64,
    eps: f64,
    runs: usize,
    max_runs: usize,
    table: &'a PrimeTable,
}

impl Bridge<'_> {
    fn fill(&mut self, a: f64, b: f64) -> bool {
        // explicit stack; widths shrink to at most resolution/2 + resolution/4
        let mut pending = vec![(a, b)];
        while let Some((a, b)) = pending.pop() {
            if b - a <= self.resolution {
                continue;
            }
            if self.runs >= self.max_runs {
                return false;
            }
            self.runs += 1;
            let mid = 0.5 * (a + b);
            let trace = crate::density::run_greedy(self.r, mid, self.table.len(), self.eps, self.table);
            let w = trace.achieved;
            if mid - w > 0.25 * self.resolution || w <= a {
                return false;
            }
            pending.push((w, b));
            pending.push((a, w));
        }
        true
    }
}

/// [`estimate_components_with`] at the given resolution and default options.
pub fn estimate_components(r: f64, limit: usize, resolution: f64, table: &PrimeTable) -> Result<ComponentReport> {
    let options = ComponentOptions {
        resolution,
        ..ComponentOptions::default()
    };
    estimate_components_with(r, limit, &options, table)
}

/// Clusters the enumerated range at `options.resolution`. With `refine` set,
/// each break is probed by greedy runs aimed inside it; a break survives only
/// if the greedy cannot place values every `resolution` across it.
///
/// Heuristic: finite enumeration cannot certify a component count.
pub fn estimate_components_with(
    r: f64,
    limit: usize,
    options: &ComponentOptions,
    table: &PrimeTable,
) -> Result<ComponentReport> {
    check_r(r)?;
    let resolution = options.resolution;
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    if limit == 0 {
        return Err(Error::InvalidArgument("enumeration limit must be >= 1".into()));
    }
    let values = enumerate_range(r, limit, table)?;
    let raw = cluster_values(&values, resolution);
    let analytic_gaps = gaps_up_to(r, options.max_witness.min(table.len()), options.zeta_tol, table)?;

    let mut bridge = Bridge {
        r,
        resolution,
        eps: 0.01 * resolution / raw.last().map_or(1.0, |c| c.max),
        runs: 0,
        max_runs: options.max_greedy_runs,
        table,
    };
    let mut clusters: Vec<Cluster> = Vec::with_capacity(raw.len());
    let mut bridged_breaks = 0;
    for c in &raw {
        match clusters.last_mut() {
            Some(prev) if options.refine && bridge.fill(prev.max, c.min) => {
                prev.max = c.max;
                prev.count += c.count;
                bridged_breaks += 1;
            }
            _ => clusters.push(*c),
        }
    }

    let guard = GAP_GUARD;
    let gaps_between_clusters = analytic_gaps
        .iter()
        .filter(|g| g.width() > resolution)
        .all(|g| clusters.iter().all(|c| c.max <= g.lo + guard || c.min >= g.hi - guard));

    Ok(ComponentReport {
        r,
        enumeration_limit: limit,
        resolution,
        estimated_components: clusters.len(),
        analytic_gaps,
        clusters,
        raw_cluster_count: raw.len(),
        bridged_breaks,
        greedy_runs: bridge.runs,
        gaps_between_clusters,
        heuristic: true,
    })
}

/// Heuristic estimate of `−inf E*_k`: the smallest `r` at which at least `k`
/// components appear.
#[derive(Debug, Clone, Serialize)]
pub struct InfEkEstimate {
    pub k: usize,
    pub estimate: f64,
    pub bracket: [f64; 2],
    pub components_at_bracket: [usize; 2],
    pub iterations: u32,
    pub enumeration_limit: usize,
    pub resolution: f64,
    pub warning: Option<String>,
    pub heuristic: bool,
}

/// Bisection on `estimated_components(r) >= k` over `[r_lo, r_hi]`, stopping
/// once the bracket is narrower than `r_tol`.
///
/// The predicate should be false at `r_lo` and true at `r_hi`; otherwise a
/// non-monotone warning naming both endpoints is returned with the bracket.
pub fn estimate_inf_ek(
    k: usize,
    limit: usize,
    r_lo: f64,
    r_hi: f64,
    r_tol: f64,
    options: &ComponentOptions,
    table: &PrimeTable,
) -> Result<InfEkEstimate> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be >= 2, got {k}")));
    }
    if !(r_lo > 1.0 && r_hi > r_lo && r_hi.is_finite()) {
        return Err(Error::Domain(format!("need 1 < r_lo < r_hi, got [{r_lo}, {r_hi}]")));
    }
    if !(r_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("r_tol must be positive, got {r_tol}")));
    }
    let count = |r: f64| estimate_components_with(r, limit, options, table).map(|c| c.estimated_components);
    let (mut lo, mut hi) = (r_lo, r_hi);
    let (mut c_lo, mut c_hi) = (count(lo)?, count(hi)?);
    let mut out = InfEkEstimate {
        k,
        estimate: hi,
        bracket: [lo, hi],
        components_at_bracket: [c_lo, c_hi],
        iterations: 0,
        enumeration_limit: limit,
        resolution: options.resolution,
        warning: None,
        heuristic: true,
    };
    if c_lo >= k || c_hi < k {
        out.warning = Some(format!(
            "non-monotone estimate: {c_lo} components at r = {lo}, {c_hi} at r = {hi}, k = {k}"
        ));
        return Ok(out);
    }
    while hi - lo > r_tol && out.iterations < 100 {
        let mid = 0.5 * (lo + hi);
        let c = count(mid)?;
        if c >= k {
            hi = mid;
            c_hi = c;
        } else {
            lo = mid;
            c_lo = c;
        }
        out.iterations += 1;
    }
    out.estimate = hi;
    out.bracket = [lo, hi];
    out.components_at_bracket = [c_lo, c_hi];
    Ok(out)
}

/// Writes one value per line with 17 significant digits.
pub fn write_values_csv<W: std::io::Write>(values: &[f64], header: bool, mut out: W) -> std::io::Result<()> {
    if header {
        writeln!(out, "value")?;
    }
    for &v in values {
        writeln!(out, "{}", crate::output::format_sig(v, 17))?;
    }
    out.flush()
}
