//! Exact integer arithmetic on `u128`: primality, factorization and the
//! derived quantities (radical, ω, Ω) every WAM formula consumes.
//!
//! Primality is deterministic Miller–Rabin below 2^64 and a fixed 40-base
//! Miller–Rabin above. Composite cofactors are split with Pollard's rho in
//! Brent's formulation, bounded by an iteration budget.

use std::fmt;

use crate::error::{Error, Result};

/// Default cap on Pollard-rho iterations spent on one composite.
pub const DEFAULT_RHO_BUDGET: u64 = 100_000_000;

/// Inputs must stay below this bound so modular additions never overflow.
pub const MAX_INPUT: u128 = 1 << 127;

const TRIAL_LIMIT: u32 = 1 << 10;

/// Sorted prime factorization `value = Π primes[k]^exponents[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u128,
    primes: Vec<u128>,
    exponents: Vec<u32>,
}

impl Factorization {
    /// The factorization of 1.
    pub fn one() -> Self {
        Factorization { value: 1, primes: Vec::new(), exponents: Vec::new() }
    }

    /// Builds a factorization from explicit prime/exponent lists, checking
    /// ordering, primality and that the product fits in `u128`.
    pub fn from_parts(primes: Vec<u128>, exponents: Vec<u32>) -> Result<Self> {
        if primes.len() != exponents.len() {
            return Err(Error::InvalidArgument("primes and exponents differ in length".into()));
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("primes must be strictly increasing".into()));
        }
        if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if exponents.contains(&0) {
            return Err(Error::InvalidArgument("exponents must be positive".into()));
        }
        let mut value: u128 = 1;
        for (&p, &e) in primes.iter().zip(&exponents) {
            for _ in 0..e {
                value = value.checked_mul(p).ok_or(Error::Overflow("factorization value"))?;
            }
        }
        Ok(Factorization { value, primes, exponents })
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn primes(&self) -> &[u128] {
        &self.primes
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Iterates over `(prime, exponent)` pairs in increasing prime order.
    pub fn iter(&self) -> impl Iterator<Item = (u128, u32)> + '_ {
        self.primes.iter().copied().zip(self.exponents.iter().copied())
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// ω: number of distinct primes.
    pub fn omega(&self) -> usize {
        self.primes.len()
    }

    /// Ω: number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u64 {
        self.exponents.iter().map(|&e| u64::from(e)).sum()
    }

    /// Product of the distinct primes; 1 for the empty factorization.
    pub fn radical(&self) -> Result<u128> {
        self.primes.iter().try_fold(1u128, |acc, &p| acc.checked_mul(p)).ok_or(Error::Overflow("radical"))
    }

    pub fn largest_prime(&self) -> Option<u128> {
        self.primes.last().copied()
    }

    /// e_m, the exponent of the largest prime.
    pub fn largest_exponent(&self) -> Option<u32> {
        self.exponents.last().copied()
    }

    /// Factorization of the product `self · other`.
    pub fn multiply(&self, other: &Factorization) -> Result<Factorization> {
        let value = self.value.checked_mul(other.value).ok_or(Error::Overflow("product"))?;
        let mut primes = Vec::with_capacity(self.omega() + other.omega());
        let mut exponents = Vec::with_capacity(primes.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.omega() || j < other.omega() {
            let take_left = j == other.omega() || (i < self.omega() && self.primes[i] < other.primes[j]);
            let take_right = i == self.omega() || (j < other.omega() && other.primes[j] < self.primes[i]);
            if take_left {
                primes.push(self.primes[i]);
                exponents.push(self.exponents[i]);
                i += 1;
            } else if take_right {
                primes.push(other.primes[j]);
                exponents.push(other.exponents[j]);
                j += 1;
            } else {
                primes.push(self.primes[i]);
                exponents.push(self.exponents[i] + other.exponents[j]);
                i += 1;
                j += 1;
            }
        }
        Ok(Factorization { value, primes, exponents })
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (k, (p, e)) in self.iter().enumerate() {
            if k > 0 {
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

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    // a, b < m < 2^127, so the sum cannot wrap.
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a * b) % m;
    }
    let (mut a, mut b) = (a % m, b);
    let mut acc = 0;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u128; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109,
    113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

fn strong_probable_prime(n: u128, d: u128, r: u32, base: u128) -> bool {
    let mut x = pow_mod(base, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..r {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Miller–Rabin. The first twelve prime bases are a proven witness set
/// below 3.3·10^24; above 2^64 all forty bases are used.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let r = d.trailing_zeros();
    d >>= r;
    let bases = if n <= u64::MAX as u128 { &SMALL_PRIMES[..12] } else { &SMALL_PRIMES[..] };
    bases.iter().all(|&a| strong_probable_prime(n, d, r, a))
}

/// Factors `n` with the default Pollard-rho budget.
pub fn factor(n: u128) -> Result<Factorization> {
    factor_with_budget(n, DEFAULT_RHO_BUDGET)
}

/// Factors `n`, giving up once `budget` rho iterations are spent on any
/// single composite cofactor.
pub fn factor_with_budget(n: u128, budget: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    if n >= MAX_INPUT {
        return Err(Error::InvalidArgument(format!("{n} is not below 2^127")));
    }
    let mut found: Vec<u128> = Vec::new();
    let mut rest = n;
    for p in 2..TRIAL_LIMIT as u128 {
        if p * p > rest {
            break;
        }
        while rest.is_multiple_of(p) {
            found.push(p);
            rest /= p;
        }
    }
    if rest > 1 {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime(m) {
                found.push(m);
                continue;
            }
            let d = find_divisor(m, budget)?;
            stack.push(d);
            stack.push(m / d);
        }
    }
    found.sort_unstable();
    let mut primes = Vec::new();
    let mut exponents: Vec<u32> = Vec::new();
    for p in found {
        if primes.last() == Some(&p) {
            *exponents.last_mut().unwrap() += 1;
        } else {
            primes.push(p);
            exponents.push(1);
        }
    }
    Ok(Factorization { value: n, primes, exponents })
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Nontrivial divisor of the odd composite `n`.
fn find_divisor(n: u128, budget: u64) -> Result<u128> {
    let r = isqrt(n);
    if r * r == n {
        return Ok(r);
    }
    let mut spent = 0u64;
    for c in 1u128.. {
        if let Some(d) = brent_rho(n, c, budget, &mut spent) {
            return Ok(d);
        }
        if spent >= budget {
            return Err(Error::FactorizationBudgetExceeded { n, budget });
        }
    }
    unreachable!()
}

// Brent's cycle detection on x -> x^2 + c, batching |x - y| products so a
// gcd is only taken every BATCH steps.
fn brent_rho(n: u128, c: u128, budget: u64, spent: &mut u64) -> Option<u128> {
    const BATCH: u64 = 128;
    let step = |x: u128| add_mod(mul_mod(x, x, n), c % n, n);
    let mut y = 2 % n;
    let mut x = y;
    let mut ys = y;
    let mut g = 1;
    let mut q = 1;
    let mut r = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        *spent += r;
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let span = BATCH.min(r - k);
            for _ in 0..span {
                y = step(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            *spent += span;
            g = gcd(q, n);
            k += span;
        }
        r *= 2;
        if *spent >= budget {
            return None;
        }
    }
    if g == n {
        // The batch overshot; replay it one step at a time.
        loop {
            ys = step(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(mut n: u128) -> Vec<(u128, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn small_examples() {
        let f = factor(72).unwrap();
        assert_eq!(f.primes(), &[2, 3]);
        assert_eq!(f.exponents(), &[3, 2]);
        assert_eq!(f.radical().unwrap(), 6);
        assert_eq!((f.omega(), f.big_omega()), (2, 5));

        let one = factor(1).unwrap();
        assert!(one.is_empty());
        assert_eq!(one.radical().unwrap(), 1);
        assert_eq!((one.omega(), one.big_omega()), (0, 0));

        let f = factor(2047).unwrap();
        assert_eq!(f.primes(), &[23, 89]);
        assert_eq!(f.radical().unwrap(), 2047);

        let f = factor(2048 * 2047).unwrap();
        assert_eq!((f.omega(), f.big_omega()), (3, 13));
        assert_eq!(f.largest_exponent(), Some(1));
    }

    #[test]
    fn zero_is_rejected() {
        assert!(matches!(factor(0), Err(Error::InvalidArgument(_))));
        assert!(factor(MAX_INPUT).is_err());
    }

    #[test]
    fn agrees_with_trial_division_to_a_million() {
        for n in 1..=1_000_000u128 {
            let f = factor(n).unwrap();
            let expected = trial_division(n);
            assert_eq!(f.iter().collect::<Vec<_>>(), expected, "n = {n}");
        }
    }

    #[test]
    fn mersenne_numbers() {
        assert_eq!(factor((1 << 61) - 1).unwrap().primes(), &[(1u128 << 61) - 1]);
        let f = factor((1 << 59) - 1).unwrap();
        assert_eq!(f.primes(), &[179951, 3203431780337]);
        let f = factor((1 << 62) - 1).unwrap();
        assert_eq!(f.primes(), &[3, 715827883, 2147483647]);
    }

    #[test]
    fn above_64_bits() {
        let p = (1u128 << 61) - 1;
        let q = 1_000_000_007u128;
        let f = factor(p * q * q).unwrap();
        assert_eq!(f.primes(), &[q, p]);
        assert_eq!(f.exponents(), &[2, 1]);
        assert!(is_prime((1u128 << 89) - 1));
        assert!(!is_prime(((1u128 << 61) - 1) * ((1u128 << 31) - 1)));
    }

    #[test]
    fn budget_is_reported() {
        // Two 61-bit primes need far more than 10 iterations.
        let n = ((1u128 << 61) - 1) * 2305843009213693921;
        match factor_with_budget(n, 10) {
            Err(Error::FactorizationBudgetExceeded { budget: 10, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn from_parts_validates() {
        assert!(Factorization::from_parts(vec![3, 2], vec![1, 1]).is_err());
        assert!(Factorization::from_parts(vec![4], vec![1]).is_err());
        assert!(Factorization::from_parts(vec![2], vec![0]).is_err());
        assert!(Factorization::from_parts(vec![2], vec![200]).is_err());
        let f = Factorization::from_parts(vec![2, 3, 5], vec![4, 1, 1]).unwrap();
        assert_eq!(f.value(), 240);
    }

    #[test]
    fn multiply_merges() {
        let a = factor(12).unwrap();
        let b = factor(45).unwrap();
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab, factor(540).unwrap());
    }
}
