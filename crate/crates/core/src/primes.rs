//! Sieve of Eratosthenes with a smallest-prime-factor table, plus the
//! consecutive-prime ratio facts that bound how fast the greedy product can
//! drift between neighbouring primes.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default sieve bound: covers enumeration to 10^6 and well past p_3101.
pub const DEFAULT_SIEVE_LIMIT: usize = 2_000_000;

/// Primes up to `limit` with 1-based indexing and a smallest-prime-factor map.
///
/// Immutable once built; share it freely between threads.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: usize,
    primes: Vec<u64>,
    smallest_factor: Vec<u32>,
}

/// Builds the table for all integers `<= limit`.
pub fn build_prime_table(limit: usize) -> Result<PrimeTable> {
    PrimeTable::new(limit)
}

impl PrimeTable {
    pub fn new(limit: usize) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        if limit > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "sieve limit {limit} exceeds {}",
                u32::MAX
            )));
        }
        let mut smallest_factor = vec![0u32; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if smallest_factor[i] == 0 {
                smallest_factor[i] = i as u32;
                primes.push(i as u64);
                if let Some(start) = i.checked_mul(i) {
                    let mut j = start;
                    while j <= limit {
                        if smallest_factor[j] == 0 {
                            smallest_factor[j] = i as u32;
                        }
                        j += i;
                    }
                }
            }
        }
        Ok(Self {
            limit,
            primes,
            smallest_factor,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Number of primes in the table.
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// All primes `<= limit`, ascending. Index 0 holds p_1 = 2.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// The i-th prime, 1-based.
    pub fn nth_prime(&self, i: usize) -> Result<u64> {
        if i == 0 || i > self.primes.len() {
            return Err(Error::OutOfRange {
                index: i,
                available: self.primes.len(),
            });
        }
        Ok(self.primes[i - 1])
    }

    /// Errors unless the table holds at least `count` primes.
    pub fn require(&self, count: usize) -> Result<()> {
        if count > self.primes.len() {
            Err(Error::OutOfRange {
                index: count,
                available: self.primes.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Smallest prime factor of `n` for `2 <= n <= limit`.
    pub fn smallest_factor(&self, n: usize) -> Option<u64> {
        if (2..=self.limit).contains(&n) {
            Some(self.smallest_factor[n] as u64)
        } else {
            None
        }
    }

    pub fn is_prime(&self, n: u64) -> Option<bool> {
        if n > self.limit as u64 {
            return None;
        }
        Some(n >= 2 && self.smallest_factor[n as usize] as u64 == n)
    }
}

/// Free-function form of [`PrimeTable::nth_prime`].
pub fn nth_prime(table: &PrimeTable, i: usize) -> Result<u64> {
    table.nth_prime(i)
}

/// Indices `j <= max_j` with `p_{j+1} / p_j >= 2^{1/3}`.
///
/// Compared as `p_{j+1}^3 >= 2 p_j^3` in integers, so no rounding near the
/// cube root of two can hide an exception.
pub fn ratio_exceptions(table: &PrimeTable, max_j: usize) -> Result<BTreeSet<usize>> {
    table.require(max_j + 1)?;
    let p = table.primes();
    Ok((1..=max_j)
        .filter(|&j| {
            let lo = p[j - 1] as u128;
            let hi = p[j] as u128;
            hi * hi * hi >= 2 * lo * lo * lo
        })
        .collect())
}

/// `(j+1)(log(j+1) + log log(j+1)) / (j log j)`, an upper bound on
/// `p_{j+1}/p_j` valid for `j >= 6`.
pub fn rosser_ratio_bound(j: u64) -> Result<f64> {
    if j < 6 {
        return Err(Error::InvalidArgument(format!(
            "ratio bound holds only for j >= 6, got {j}"
        )));
    }
    let jf = j as f64;
    let next = jf + 1.0;
    Ok(next * (next.ln() + next.ln().ln()) / (jf * jf.ln()))
}

/// Evaluation of the ratio bound over a logarithmic grid of `j`.
#[derive(Debug, Clone, Serialize)]
pub struct RosserSweep {
    pub j_lo: u64,
    pub j_hi: u64,
    pub samples: usize,
    /// Largest bound value seen on the grid.
    pub max_bound: f64,
    /// Every sample below `2^{1/3}`.
    pub below_cube_root_two: bool,
    /// Bound decreasing from each grid point to the next, and across a unit
    /// step at each grid point.
    pub decreasing: bool,
}

/// Samples `rosser_ratio_bound` on `points_per_decade` log-spaced points per
/// decade of `[j_lo, j_hi]`. This is numerical evidence only; the infinite
/// claim is not certified.
pub fn rosser_sweep(j_lo: u64, j_hi: u64, points_per_decade: usize) -> Result<RosserSweep> {
    if j_lo < 6 || j_hi < j_lo || points_per_decade == 0 {
        return Err(Error::InvalidArgument(format!(
            "bad sweep [{j_lo}, {j_hi}] with {points_per_decade} points per decade"
        )));
    }
    let decades = (j_hi as f64 / j_lo as f64).log10();
    let steps = ((decades * points_per_decade as f64).ceil() as usize).max(1);
    let mut grid: Vec<u64> = (0..=steps)
        .map(|k| {
            let x = (j_lo as f64) * 10f64.powf(decades * k as f64 / steps as f64);
            (x.round() as u64).clamp(j_lo, j_hi)
        })
        .collect();
    grid.dedup();

    let cube_root_two = 2f64.cbrt();
    let mut max_bound = f64::NEG_INFINITY;
    let mut below = true;
    let mut decreasing = true;
    let mut prev: Option<f64> = None;
    for &j in &grid {
        let b = rosser_ratio_bound(j)?;
        max_bound = max_bound.max(b);
        below &= b < cube_root_two;
        decreasing &= rosser_ratio_bound(j + 1)? < b;
        if let Some(pb) = prev {
            decreasing &= b < pb;
        }
        prev = Some(b);
    }
    Ok(RosserSweep {
        j_lo,
        j_hi,
        samples: grid.len(),
        max_bound,
        below_cube_root_two: below,
        decreasing,
    })
}
