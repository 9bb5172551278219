//! Shared fixtures for the benchmarks in `benches/`.

use std::sync::OnceLock;

use unisig_core::{build_prime_table, PrimeTable};

/// Sieve limit used by every benchmark; large enough for 10^6 enumerations.
pub const BENCH_SIEVE_LIMIT: usize = 2_000_000;

/// A prime table built once per benchmark process.
pub fn table() -> &'static PrimeTable {
    static TABLE: OnceLock<PrimeTable> = OnceLock::new();
    TABLE.get_or_init(|| build_prime_table(BENCH_SIEVE_LIMIT).expect("valid sieve limit"))
}
