//! Inputs shared by the benchmarks.

use wamlab::{factor, Factorization};

/// Semiprime with two 31-bit factors, a typical Pollard-rho workload.
pub const SEMIPRIME: u128 = 2_147_483_647 * 2_147_483_629;

/// abc of (13573088, 349609375, 363182463).
pub fn large_abc() -> Factorization {
    factor(13_573_088u128 * 349_609_375 * 363_182_463).expect("fits in u128")
}

/// 2^40 (2^40 - 1), nine distinct primes.
pub fn mersenne_40() -> Factorization {
    factor((1u128 << 40) * ((1u128 << 40) - 1)).expect("fits in u128")
}
