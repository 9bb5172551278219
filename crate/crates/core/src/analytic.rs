//! ζ(s), the ratio ζ(r)/ζ(2r) and the products and margins that decide
//! whether the range of σ*_{-r} has a gap.
//!
//! Notation: `p_i` is the i-th prime, `P_m(r) = Π_{i<=m} (1 + p_i^{-r})`,
//!
//! * `F(m, r) = (p_m^{2r} + p_m^r)/(p_m^{2r} + 1) · P_m(r)`
//! * `V_m(r) = log F(m, r) − log(ζ(r)/ζ(2r))`, positive exactly when the
//!   m-th gap exists
//! * `J_m(r)`, a six-term lower surrogate for `(∂V_m/∂r) / log p_m`.
//!
//! Everything is evaluated through `q = p^{-r} <= 1/2`, which never overflows.

use crate::bounded::BoundedValue;
use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// Default absolute tolerance for ζ-dependent quantities.
pub const DEFAULT_ZETA_TOL: f64 = 1e-12;

/// Hard cap on the number of series terms summed for one ζ evaluation.
pub const MAX_SERIES_TERMS: u64 = 100_000_000;

const EPS: f64 = f64::EPSILON;
const ROUNDING_ULPS: f64 = 6.0;

/// Number of primes the slope surrogate adds after `p_m`.
pub const SURROGATE_TERMS: usize = 6;

/// Lower and upper bound for `Σ_{n > N} (c/n)^s`.
///
/// `x ↦ (c/x)^s` is convex and decreasing, so the trapezoid rule
/// overestimates and the midpoint rule underestimates its integral:
/// `∫_N^∞ f − f(N)/2 <= Σ_{n>N} f(n) <= ∫_{N+1/2}^∞ f`.
fn tail_enclosure(s: f64, c: f64, n: u64) -> (f64, f64) {
    let integral_from = |x: f64| x * (c / x).powf(s) / (s - 1.0);
    let n = n as f64;
    let hi = integral_from(n + 0.5);
    let lo = (integral_from(n) - 0.5 * (c / n).powf(s)).max(0.0);
    (lo, hi)
}

fn enclosure_error(s: f64, c: f64, n: u64) -> f64 {
    let (lo, hi) = tail_enclosure(s, c, n);
    // half-width, plus the cancellation in hi - lo
    0.5 * (hi - lo) + 4.0 * EPS * hi
}

/// `Σ_{n>=2} (c/n)^s = c^s (ζ(s) − 1)` for `s > 1`, `c > 0`, with absolute
/// error at most `tol`.
///
/// Partial sum up to `N` plus the midpoint of the convex tail enclosure.
/// With `c` a power of two the terms are computed from exact quotients.
pub fn power_tail_sum(s: f64, c: f64, tol: f64) -> Result<BoundedValue> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("series needs s > 1, got {s}")));
    }
    if !(tol > 0.0) || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need tol > 0 and c > 0, got tol={tol}, c={c}"
        )));
    }
    // (c/2)^s (1 + 2/(s−1)) bounds the sum; reserve its rounding share first
    let magnitude = (0.5 * c).powf(s) * (1.0 + 2.0 / (s - 1.0));
    let budget = tol - ROUNDING_ULPS * EPS * magnitude;
    if !(budget > 0.0) {
        return Err(Error::PrecisionUnachievable {
            tol,
            cap: MAX_SERIES_TERMS,
        });
    }

    // smallest N (up to doubling slack) whose enclosure fits the budget
    let mut hi_n = 2u64;
    while enclosure_error(s, c, hi_n) > budget {
        if hi_n >= MAX_SERIES_TERMS {
            return Err(Error::PrecisionUnachievable {
                tol,
                cap: MAX_SERIES_TERMS,
            });
        }
        hi_n = (hi_n * 2).min(MAX_SERIES_TERMS);
    }
    let mut lo_n = (hi_n / 2).max(2);
    while lo_n < hi_n {
        let mid = lo_n + (hi_n - lo_n) / 2;
        if enclosure_error(s, c, mid) > budget {
            lo_n = mid + 1;
        } else {
            hi_n = mid;
        }
    }
    let n_terms = hi_n;

    // smallest terms first, compensated
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in (2..=n_terms).rev() {
        let term = (n as f64 / c).powf(-s);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let (lo, hi) = tail_enclosure(s, c, n_terms);
    let tail = 0.5 * (lo + hi);
    let value = sum + tail;
    // one ulp per power, Kahan summation, final addition
    let rounding = (4.0 * EPS + n_terms as f64 * EPS * EPS) * sum + EPS * value;
    let error = enclosure_error(s, c, n_terms) + rounding;
    if error > tol {
        return Err(Error::PrecisionUnachievable {
            tol,
            cap: MAX_SERIES_TERMS,
        });
    }
    Ok(BoundedValue::new(value, error))
}

/// `ζ(s) − 1`, accurate in relative terms even when it is tiny.
pub fn zeta_minus_one(s: f64, tol: f64) -> Result<BoundedValue> {
    power_tail_sum(s, 1.0, tol)
}

/// Riemann ζ for real `s > 1` with absolute error at most `tol`.
pub fn zeta(s: f64, tol: f64) -> Result<BoundedValue> {
    let tail = zeta_minus_one(s, 0.75 * tol)?;
    let v = BoundedValue::exact(1.0) + tail;
    if v.error_bound > tol {
        return Err(Error::PrecisionUnachievable {
            tol,
            cap: MAX_SERIES_TERMS,
        });
    }
    Ok(v)
}

/// `2^r (ζ(r)/ζ(2r) − 1)`. Stays of order one for every `r > 1`, which lets
/// comparisons at large `r` resolve differences far below machine epsilon.
pub fn zeta_ratio_excess_scaled(r: f64, tol: f64) -> Result<BoundedValue> {
    if !(r > 1.0) {
        return Err(Error::Domain(format!("ζ(r)/ζ(2r) needs r > 1, got {r}")));
    }
    // a = 2^r (ζ(r) − 1), b = 4^r (ζ(2r) − 1)
    let inv_2r = 2f64.powf(-r);
    let inv_4r = inv_2r * inv_2r;
    let a = power_tail_sum(r, 2.0, tol / 5.0)?;
    // the result moves by at most 2^{-r} + a 4^{-r} per unit change in b
    let b = power_tail_sum(2.0 * r, 2.0, tol / 5.0 / (inv_2r + a.hi() * inv_4r))?;
    // ζ(r)/ζ(2r) − 1 = (z_r − z_2r) / (1 + z_2r)
    let num = a - b.scale(inv_2r);
    let den = BoundedValue::exact(1.0) + b.scale(inv_4r);
    Ok(num / den)
}

/// `ζ(r)/ζ(2r) − 1`.
pub fn zeta_ratio_minus_one(r: f64, tol: f64) -> Result<BoundedValue> {
    let scale = 2f64.powf(-r);
    let scaled = zeta_ratio_excess_scaled(r, tol / scale)?;
    Ok(scaled.scale(scale))
}

/// `ζ(r)/ζ(2r) = Π_p (1 + p^{-r})`, the supremum of `σ*_{-r}(ℕ)`.
pub fn zeta_ratio(r: f64, tol: f64) -> Result<BoundedValue> {
    let excess = zeta_ratio_minus_one(r, tol)?;
    Ok(BoundedValue::exact(1.0) + excess)
}

fn check_r(r: f64) -> Result<()> {
    if r > 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("need finite r > 1, got {r}")))
    }
}

/// `p^{-r}`.
fn inv_power(p: u64, r: f64) -> f64 {
    (p as f64).powf(-r)
}

/// `P_m(r) = Π_{i=1}^m (1 + p_i^{-r})`; 1 for `m = 0`.
pub fn finite_euler_product(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    table.require(m)?;
    Ok(table.primes()[..m].iter().map(|&p| 1.0 + inv_power(p, r)).product())
}

/// `log P_m(r)` summed from `ln_1p` terms.
pub fn log_finite_euler_product(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    table.require(m)?;
    Ok(table.primes()[..m].iter().map(|&p| inv_power(p, r).ln_1p()).sum())
}

/// `Π_{i>m} (1 + p_i^{-r})`, computed as `(ζ(r)/ζ(2r)) / P_m(r)` rather
/// than by truncating the infinite product.
pub fn tail_product(m: usize, r: f64, tol: f64, table: &PrimeTable) -> Result<BoundedValue> {
    check_r(r)?;
    let prefix = finite_euler_product(m, r, table)?;
    let prefix = BoundedValue::rounded(prefix, 2.0 * (m as f64 + 1.0));
    Ok(zeta_ratio(r, tol * 0.25)? / prefix)
}

/// `(p^{2r} + 1)/(p^{2r} + p^r)`: the factor by which using `p^α`, `α >= 2`,
/// instead of `p` shrinks the supremum.
pub fn unitary_gap_factor(p: u64, r: f64) -> f64 {
    let q = inv_power(p, r);
    (1.0 + q * q) / (1.0 + q)
}

/// `F(m, r)`. `m` is 1-based.
pub fn witness_product(m: usize, r: f64, table: &PrimeTable) -> Result<BoundedValue> {
    check_r(r)?;
    if m == 0 {
        return Err(Error::InvalidArgument("F(m, r) needs m >= 1".into()));
    }
    let prefix = finite_euler_product(m, r, table)?;
    let v = prefix / unitary_gap_factor(table.primes()[m - 1], r);
    Ok(BoundedValue::rounded(v, 2.0 * (m as f64 + 4.0)))
}

/// `F(1, r), …, F(m_max, r)` in one pass over the primes.
pub fn witness_products(m_max: usize, r: f64, table: &PrimeTable) -> Result<Vec<f64>> {
    check_r(r)?;
    table.require(m_max)?;
    let mut prefix = 1.0;
    Ok(table.primes()[..m_max]
        .iter()
        .map(|&p| {
            prefix *= 1.0 + inv_power(p, r);
            prefix / unitary_gap_factor(p, r)
        })
        .collect())
}

/// `log F(m, r)` from `ln_1p` terms.
pub fn log_witness_product(m: usize, r: f64, table: &PrimeTable) -> Result<BoundedValue> {
    check_r(r)?;
    if m == 0 {
        return Err(Error::InvalidArgument("F(m, r) needs m >= 1".into()));
    }
    let log_prefix = log_finite_euler_product(m, r, table)?;
    let q = inv_power(table.primes()[m - 1], r);
    // (p^{2r}+p^r)/(p^{2r}+1) = 1 + q(1−q)/(1+q²)
    let head = (q * (1.0 - q) / (1.0 + q * q)).ln_1p();
    let v = log_prefix + head;
    Ok(BoundedValue::rounded(v, 2.0 * (m as f64 + 4.0)))
}

/// `log F(m+1, r) − log F(m, r)`, free of the shared prefix.
///
/// Equals `log((p'^r+1)^2/(p'^{2r}+1)) − log((p^{2r}+p^r)/(p^{2r}+1))`
/// with `p = p_m`, `p' = p_{m+1}`.
pub fn witness_step_log_ratio(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    check_r(r)?;
    if m == 0 {
        return Err(Error::InvalidArgument("F(m, r) needs m >= 1".into()));
    }
    table.require(m + 1)?;
    let q = inv_power(table.primes()[m - 1], r);
    let qn = inv_power(table.primes()[m], r);
    let up = (2.0 * qn / (1.0 + qn * qn)).ln_1p();
    let down = (q * (1.0 - q) / (1.0 + q * q)).ln_1p();
    Ok(up - down)
}

/// `V_m(r) = log F(m, r) − log(ζ(r)/ζ(2r))`, with error at most `tol`.
///
/// `V_m(r) <= 0` iff `(p_m^{2r}+p_m^r)/(p_m^{2r}+1) <= Π_{i>m}(1+p_i^{-r})`.
pub fn gap_margin(m: usize, r: f64, tol: f64, table: &PrimeTable) -> Result<BoundedValue> {
    let log_f = log_witness_product(m, r, table)?;
    // log-scale error is relative error; ζ(r) > 1/(r−1) and ζ(2r) < ζ(2) < 1.65
    let ratio_floor = (1.0 + 2f64.powf(-r)).max(1.0 / ((r - 1.0) * 1.65));
    let log_ratio = zeta_ratio_minus_one(r, 0.2 * tol * ratio_floor)?.ln_1p();
    let v = log_f - log_ratio;
    if v.error_bound > tol {
        return Err(Error::PrecisionUnachievable {
            tol,
            cap: MAX_SERIES_TERMS,
        });
    }
    Ok(v)
}

/// `J_m(r) = Σ_{i=m+1}^{m+6} 1/(p_i^r + 1) − (p_m^{2r} − 2p_m^r − 1)/((p_m^r + 1)(p_m^{2r} + 1))`.
pub fn slope_surrogate(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("J_m needs m >= 1".into()));
    }
    table.require(m + SURROGATE_TERMS)?;
    let p = table.primes();
    let sum: f64 = p[m..m + SURROGATE_TERMS]
        .iter()
        .map(|&pi| {
            let qi = inv_power(pi, r);
            qi / (1.0 + qi)
        })
        .sum();
    let q = inv_power(p[m - 1], r);
    let head = q * (1.0 - 2.0 * q - q * q) / ((1.0 + q) * (1.0 + q * q));
    Ok(sum - head)
}

/// The `p_m` part of `∂J_m/∂r`:
/// `p_m^r((p_m^r − 1)^4 − 12 p_m^{2r}) log p_m / ((p_m^r + 1)^2 (p_m^{2r} + 1)^2)`.
pub fn slope_surrogate_head_derivative(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    let p = table.nth_prime(m)?;
    let q = inv_power(p, r);
    let omq = 1.0 - q;
    let num = q * omq.powi(4) - 12.0 * q * q * q;
    let den = (1.0 + q).powi(2) * (1.0 + q * q).powi(2);
    Ok(num / den * (p as f64).ln())
}

/// `∂J_m/∂r` in closed form.
pub fn slope_surrogate_derivative(m: usize, r: f64, table: &PrimeTable) -> Result<f64> {
    table.require(m + SURROGATE_TERMS)?;
    let head = slope_surrogate_head_derivative(m, r, table)?;
    let sum: f64 = table.primes()[m..m + SURROGATE_TERMS]
        .iter()
        .map(|&pi| {
            let qi = inv_power(pi, r);
            qi * (pi as f64).ln() / ((1.0 + qi) * (1.0 + qi))
        })
        .sum();
    Ok(head - sum)
}
