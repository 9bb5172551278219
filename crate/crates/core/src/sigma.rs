//! Unitary divisor functions `σ*_t(n) = Σ_{d | n, gcd(d, n/d) = 1} d^t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// A positive integer as `(prime, exponent)` pairs with strictly increasing
/// primes. The empty list is 1.
///
/// Greedy constructions produce integers with thousands of digits; they only
/// ever exist in this form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredInteger {
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds from pairs, checking canonical form. Primality of the bases is
    /// the caller's responsibility.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidArgument(
                    "prime factors must be strictly increasing".into(),
                ));
            }
        }
        if factors.iter().any(|&(p, e)| p < 2 || e == 0) {
            return Err(Error::InvalidArgument(
                "factors need primes >= 2 and exponents >= 1".into(),
            ));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of distinct prime factors, ω(n).
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Exponent of `p` in the factorization (ν_p).
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// The integer itself, if it fits in a `u64`.
    pub fn value(&self) -> Option<u64> {
        self.factors
            .iter()
            .try_fold(1u64, |acc, &(p, e)| p.checked_pow(e).and_then(|pe| acc.checked_mul(pe)))
    }

    /// Appends a prime power larger than every current factor.
    pub(crate) fn push(&mut self, p: u64, e: u32) {
        debug_assert!(self.factors.last().is_none_or(|&(q, _)| q < p));
        self.factors.push((p, e));
    }
}

impl std::fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Factors `n` with the smallest-factor table, falling back to trial
/// division for `n` above the sieve limit.
pub fn factorize(n: u64, table: &PrimeTable) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    if n <= table.limit() as u64 {
        while rest > 1 {
            let p = table.smallest_factor(rest as usize).unwrap_or(rest);
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        return Ok(FactoredInteger { factors });
    }

    for &p in table.primes() {
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        // rest has no prime factor <= limit, so it is prime iff rest <= limit^2
        let limit = table.limit() as u128;
        if rest as u128 > limit * limit {
            return Err(Error::NeedsLargerTable {
                value: n,
                limit: table.limit(),
            });
        }
        factors.push((rest, 1));
    }
    Ok(FactoredInteger { factors })
}

/// `p^{α t}`. Integer exponents go through `powi` so small cases are exact.
fn prime_power(p: u64, alpha: u32, t: f64) -> f64 {
    let exponent = alpha as f64 * t;
    if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        let base = p as f64;
        if exponent >= 0.0 {
            base.powi(exponent as i32)
        } else {
            1.0 / base.powi(-exponent as i32)
        }
    } else {
        (exponent * (p as f64).ln()).exp()
    }
}

/// `log(1 + p^{α t})`, stable for either sign of the exponent.
pub fn log_unitary_factor(p: u64, alpha: u32, t: f64) -> f64 {
    let e = alpha as f64 * t * (p as f64).ln();
    if e > 0.0 {
        e + (-e).exp().ln_1p()
    } else {
        e.exp().ln_1p()
    }
}

/// `σ*_t(n) = Π (1 + p^{α t})` over the factorization.
pub fn unitary_sigma(t: f64, n: &FactoredInteger) -> f64 {
    let direct: f64 = n.factors.iter().map(|&(p, a)| 1.0 + prime_power(p, a, t)).product();
    if direct.is_finite() {
        direct
    } else {
        log_unitary_sigma(t, n).exp()
    }
}

/// `log σ*_t(n)` as a sum of stable per-factor logarithms.
pub fn log_unitary_sigma(t: f64, n: &FactoredInteger) -> f64 {
    n.factors.iter().map(|&(p, a)| log_unitary_factor(p, a, t)).sum()
}

/// Unitary divisors of `n`, ascending. There are `2^ω(n)` of them.
pub fn unitary_divisors(n: u64, table: &PrimeTable) -> Result<Vec<u64>> {
    let f = factorize(n, table)?;
    let mut divisors = vec![1u64];
    for &(p, e) in f.factors() {
        let pe = p.pow(e);
        let extra: Vec<u64> = divisors.iter().map(|d| d * pe).collect();
        divisors.extend(extra);
    }
    divisors.sort_unstable();
    Ok(divisors)
}

/// Direct sum of `d^t` over the unitary divisors. Test oracle for
/// [`unitary_sigma`].
pub fn unitary_sigma_oracle(t: f64, n: u64, table: &PrimeTable) -> Result<f64> {
    Ok(unitary_divisors(n, table)?
        .into_iter()
        .map(|d| (d as f64).powf(t))
        .sum())
}
