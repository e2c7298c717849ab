//! Polynomials over prime fields and their ABC triples.
//!
//! Heights of irreducible factors are their degrees, so
//! `wam(f, s) = Σ e_k (deg p_k)^s / Σ (deg p_k)^s`. Linear factors have
//! height 1 and contribute `1^s = 1` for every `s`.
//!
//! Only prime fields are supported; prime-power fields would need extension
//! field arithmetic underneath [`FpPoly`].

mod factor;
mod gf2;
mod poly;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{factor as factor_integer, is_prime};
use crate::error::{Error, Result};
use crate::wamcore::{ComplexPoint, WamFunction, WamValue, POLE_THRESHOLD};

pub use factor::{is_irreducible, poly_factor, poly_factor_seeded, PolyFactorization, MAX_FACTOR_DEGREE};
pub use poly::{FpPoly, MAX_CHARACTERISTIC};

/// Candidates the pigeonhole search may enumerate.
pub const ENUMERATION_BUDGET: u64 = 1 << 26;

/// Möbius function of a small positive integer.
fn mobius(d: u64) -> i64 {
    let f = factor_integer(u128::from(d)).expect("small");
    if f.exponents().iter().any(|&e| e > 1) {
        0
    } else if f.omega().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Number of monic irreducible polynomials of degree `n` over `F_q`:
/// `(1/n) Σ_{d | n} μ(d) q^(n/d)`.
pub fn count_irreducibles(q: u32, n: u32) -> Result<u64> {
    poly::check_characteristic(q)?;
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let top = u64::from(q).checked_pow(n).filter(|&v| v < 1 << 63).ok_or(Error::Overflow("q^n"))?;
    let mut sum = i128::from(top);
    for d in 2..=u64::from(n) {
        if u64::from(n) % d == 0 {
            let mu = mobius(d);
            if mu != 0 {
                sum += i128::from(mu) * i128::from(u64::from(q).pow(n / d as u32));
            }
        }
    }
    Ok((sum / i128::from(n)) as u64)
}

/// Coprime `a + b = c` over one prime field, at least one of them with a
/// nonzero formal derivative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyAbcTriple {
    a: FpPoly,
    b: FpPoly,
    c: FpPoly,
}

impl PolyAbcTriple {
    pub fn new(a: FpPoly, b: FpPoly, c: FpPoly) -> Result<Self> {
        let q = a.characteristic();
        if b.characteristic() != q || c.characteristic() != q {
            return Err(Error::InvalidArgument("triple mixes characteristics".into()));
        }
        if &a + &b != c {
            return Err(Error::InvalidArgument("a + b != c".into()));
        }
        if !(a.gcd(&b).is_one() && b.gcd(&c).is_one() && a.gcd(&c).is_one()) {
            return Err(Error::NotCoprime);
        }
        if [&a, &b, &c].iter().all(|p| p.derivative().is_zero()) {
            return Err(Error::InvalidArgument("all formal derivatives vanish".into()));
        }
        Ok(PolyAbcTriple { a, b, c })
    }

    pub fn a(&self) -> &FpPoly {
        &self.a
    }

    pub fn b(&self) -> &FpPoly {
        &self.b
    }

    pub fn c(&self) -> &FpPoly {
        &self.c
    }

    pub fn characteristic(&self) -> u32 {
        self.a.characteristic()
    }

    /// Factorization of `a·b·c`, assembled from the (coprime) parts.
    pub fn abc_factorization(&self) -> Result<PolyFactorization> {
        let mut fac = poly_factor(&self.a)?;
        fac.merge(poly_factor(&self.b)?);
        fac.merge(poly_factor(&self.c)?);
        Ok(fac)
    }
}

/// wam of a factored polynomial with degrees as heights.
pub fn poly_factorization_wam(fac: &PolyFactorization, s: ComplexPoint) -> Result<WamValue> {
    let heights: Vec<f64> = fac.degrees().iter().map(|&d| d as f64).collect();
    let wf = WamFunction::from_heights(&heights, &fac.exponents())?;
    Ok(wf.value(s.to_complex()))
}

/// wam(abc, s) for a polynomial triple.
pub fn poly_wam(t: &PolyAbcTriple, s: ComplexPoint) -> Result<WamValue> {
    poly_factorization_wam(&t.abc_factorization()?, s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MasonStothersReport {
    pub wam_one: f64,
    pub holds: bool,
}

/// `wam(abc, 1) <= 3`, which holds for every valid polynomial triple.
pub fn mason_stothers_check(t: &PolyAbcTriple) -> Result<MasonStothersReport> {
    let wam_one = match poly_wam(t, ComplexPoint::real(1.0)?)? {
        WamValue::Finite(z) => z.re,
        WamValue::Pole => unreachable!("degrees are positive at s = 1"),
    };
    Ok(MasonStothersReport { wam_one, holds: wam_one <= 3.0 + 1e-9 })
}

/// `(p + p^s + 1) / (p^s + 2)`, the wam of the rational triple
/// `(1, x^p - 1, x^p)` whose product factors as `(x - 1) Φ_p(x) x^p`.
pub fn cyclotomic_wam_formula(p: u64, s: ComplexPoint) -> Result<WamValue> {
    if !is_prime(u128::from(p)) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let p = p as f64;
    let ps = (s.to_complex() * p.ln()).exp();
    let den = ps + 2.0;
    if den.norm() < POLE_THRESHOLD * (ps.norm() + 2.0) {
        return Ok(WamValue::Pole);
    }
    Ok(WamValue::Finite((ps + p + 1.0) / den))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PigeonholeReport {
    /// `(Q, x^(n-k) R, P)`.
    pub triple: PolyAbcTriple,
    pub q: u32,
    pub n: u32,
    pub k: u32,
    /// `R = (P - Q) / x^(n-k)`.
    pub r: FpPoly,
    /// N_q(n) from the Möbius formula.
    pub formula_count: u64,
    /// Irreducibles found by enumeration.
    pub irreducible_count: u64,
    /// q^(n-k), the number of possible lower parts.
    pub lower_parts: u64,
    pub occupied_buckets: u64,
    pub colliding_buckets: u64,
    pub max_bucket: u64,
}

/// Smallest `k` with `q^k >= n`, i.e. `ceil(ln n / ln q)` in exact
/// arithmetic.
pub fn pigeonhole_k(q: u32, n: u32) -> u32 {
    let mut k = 0;
    let mut power = 1u64;
    while power < u64::from(n) {
        power *= u64::from(q);
        k += 1;
    }
    k
}

/// Monic degree-`n` polynomial whose lower coefficients are the base-`q`
/// digits of `index`.
fn monic_from_index(index: u64, n: u32, q: u32) -> FpPoly {
    let mut coeffs: Vec<u32> = Vec::with_capacity(n as usize + 1);
    let mut rest = index;
    for _ in 0..n {
        coeffs.push((rest % u64::from(q)) as u32);
        rest /= u64::from(q);
    }
    coeffs.push(1);
    FpPoly::new(coeffs.into_iter().map(u64::from).collect(), q).expect("q checked")
}

/// Finds two monic irreducibles of degree `n` over `F_q` that agree in
/// their lowest `n - k` coefficients and returns the resulting triple.
///
/// Candidates are enumerated in blocks sharing the top `k` coefficients.
/// Among all lower parts hit at least twice, the smallest (as a base-`q`
/// number) wins, and within it the two smallest upper parts give `Q < P`.
pub fn pigeonhole_triple(q: u32, n: u32) -> Result<PigeonholeReport> {
    poly::check_characteristic(q)?;
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    if n.is_multiple_of(q) {
        return Err(Error::PreconditionFailed(format!(
            "characteristic {q} divides n = {n}, so derivatives may vanish"
        )));
    }
    let total = u64::from(q)
        .checked_pow(n)
        .filter(|&t| t <= ENUMERATION_BUDGET)
        .ok_or_else(|| Error::BudgetExceeded(format!("{q}^{n} candidates exceed 2^26")))?;
    let k = pigeonhole_k(q, n).min(n);
    let formula_count = count_irreducibles(q, n)?;
    let lower_parts = u64::from(q).pow(n - k);
    if formula_count <= lower_parts {
        return Err(Error::PreconditionFailed(format!(
            "N_{q}({n}) = {formula_count} does not exceed q^(n-k) = {lower_parts} (k = {k})"
        )));
    }

    let uppers = total / lower_parts;
    let prime_divisors: Vec<u32> = factor_integer(u128::from(n))?.primes().iter().map(|&r| r as u32).collect();
    let blocks: Vec<Vec<u64>> = (0..uppers)
        .into_par_iter()
        .map(|upper| {
            (0..lower_parts)
                .filter(|&lower| {
                    let index = upper * lower_parts + lower;
                    if q == 2 {
                        gf2::is_irreducible((1u64 << n) | index, &prime_divisors)
                    } else {
                        is_irreducible(&monic_from_index(index, n, q))
                    }
                })
                .collect()
        })
        .collect();

    let irreducible_count: u64 = blocks.iter().map(|b| b.len() as u64).sum();
    let mut pairs: Vec<(u64, u64)> =
        blocks.iter().enumerate().flat_map(|(upper, lowers)| lowers.iter().map(move |&l| (l, upper as u64))).collect();
    pairs.sort_unstable();

    let mut occupied_buckets = 0;
    let mut colliding_buckets = 0;
    let mut max_bucket = 0;
    let mut first: Option<(u64, u64, u64)> = None;
    for bucket in pairs.chunk_by(|x, y| x.0 == y.0) {
        occupied_buckets += 1;
        max_bucket = max_bucket.max(bucket.len() as u64);
        if bucket.len() >= 2 {
            colliding_buckets += 1;
            if first.is_none() {
                first = Some((bucket[0].0, bucket[0].1, bucket[1].1));
            }
        }
    }
    let (lower, upper_q, upper_p) =
        first.ok_or_else(|| Error::PreconditionFailed("no two irreducibles share a lower part".into()))?;
    let small = monic_from_index(upper_q * lower_parts + lower, n, q);
    let large = monic_from_index(upper_p * lower_parts + lower, n, q);
    let diff = &large - &small;
    let shift = (n - k) as usize;
    debug_assert!(diff.coefficients()[..shift.min(diff.coefficients().len())].iter().all(|&c| c == 0));
    let r = FpPoly::from_reduced(diff.coefficients()[shift..].to_vec(), q);
    let triple = PolyAbcTriple::new(small, diff, large)?;
    Ok(PigeonholeReport {
        triple,
        q,
        n,
        k,
        r,
        formula_count,
        irreducible_count,
        lower_parts,
        occupied_buckets,
        colliding_buckets,
        max_bucket,
    })
}

impl PigeonholeReport {
    pub fn wam(&self, s: ComplexPoint) -> Result<WamValue> {
        poly_wam(&self.triple, s)
    }
}

/// Convenience for callers holding a raw complex number.
pub fn cyclotomic_wam_at(p: u64, s: Complex64) -> Result<WamValue> {
    cyclotomic_wam_formula(p, ComplexPoint::try_from(s)?)
}
