//! Unitary divisor functions `σ*_t` and the topology of their ranges.
//!
//! For `r > 1` the values `σ*_{-r}(n)` lie in `[1, ζ(r)/ζ(2r))`. Their closure
//! is the whole interval exactly when `r <= η* ≈ 1.9742550`; above that a gap
//! opens next to the second prime. This crate evaluates the functions,
//! locates `η*`, reproduces the grid certificates behind the threshold,
//! runs the greedy construction that approximates any target value, and
//! exhibits explicit gaps when they exist.

// `!(x > y)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
mod bounded;
pub mod certify;
pub mod density;
pub mod error;
pub mod gaps;
pub mod output;
pub mod primes;
pub mod sigma;

pub use bounded::BoundedValue;
pub use error::{Error, Result};
pub use primes::{build_prime_table, PrimeTable};
pub use sigma::FactoredInteger;
