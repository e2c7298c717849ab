//! Factorization over `F_q`: square-free decomposition, distinct-degree
//! splitting, then Cantor–Zassenhaus equal-degree splitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::FpPoly;
use crate::arith::factor;
use crate::error::{Error, Result};

pub const MAX_FACTOR_DEGREE: usize = 64;
pub const DEFAULT_SEED: u64 = 0x5eed_f00d;

/// `unit · Π factor_k^exponent_k` with monic irreducible factors sorted by
/// degree and then coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFactorization {
    pub unit: u32,
    pub characteristic: u32,
    pub factors: Vec<(FpPoly, u32)>,
}

impl PolyFactorization {
    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|(f, _)| f.degree().unwrap()).collect()
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.factors.iter().map(|&(_, e)| e).collect()
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn big_omega(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| u64::from(e)).sum()
    }

    pub fn product(&self) -> FpPoly {
        let q = self.characteristic;
        self.factors.iter().fold(FpPoly::constant(self.unit, q), |acc, (f, e)| &acc * &f.pow(*e))
    }

    /// Merges another factorization into this one (multiplying the inputs).
    pub fn merge(&mut self, other: PolyFactorization) {
        assert_eq!(self.characteristic, other.characteristic);
        self.unit = ((u64::from(self.unit) * u64::from(other.unit)) % u64::from(self.characteristic)) as u32;
        for (f, e) in other.factors {
            match self.factors.iter_mut().find(|(g, _)| *g == f) {
                Some((_, existing)) => *existing += e,
                None => self.factors.push((f, e)),
            }
        }
        sort_factors(&mut self.factors);
    }
}

fn sort_factors(factors: &mut [(FpPoly, u32)]) {
    factors.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then_with(|| a.coefficients().cmp(b.coefficients())));
}

pub fn poly_factor(p: &FpPoly) -> Result<PolyFactorization> {
    poly_factor_seeded(p, DEFAULT_SEED)
}

/// Factorization with an explicit seed for the randomized splitting. The
/// result does not depend on the seed.
pub fn poly_factor_seeded(p: &FpPoly, seed: u64) -> Result<PolyFactorization> {
    let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
    if degree > MAX_FACTOR_DEGREE {
        return Err(Error::InvalidArgument(format!("degree {degree} exceeds {MAX_FACTOR_DEGREE}")));
    }
    let q = p.characteristic();
    let (unit, monic) = p.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (part, multiplicity) in square_free(&monic) {
        for (block, d) in distinct_degree(&part) {
            for irreducible in equal_degree(&block, d, &mut rng) {
                factors.push((irreducible, multiplicity));
            }
        }
    }
    sort_factors(&mut factors);
    Ok(PolyFactorization { unit, characteristic: q, factors })
}

/// `g(x^q)` written as `h(x)^q`; returns `h`. Over a prime field every
/// coefficient is its own q-th power.
fn pth_root(g: &FpPoly) -> FpPoly {
    let q = g.characteristic() as usize;
    let coeffs = g.coefficients().iter().step_by(q).copied().collect();
    FpPoly::from_reduced(coeffs, g.characteristic())
}

/// Square-free parts `(s_i, i)` with `f = Π s_i^i`, each `s_i` monic,
/// square-free and non-constant.
fn square_free(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let mut out = Vec::new();
    square_free_into(f, 1, &mut out);
    out
}

fn square_free_into(f: &FpPoly, scale: u32, out: &mut Vec<(FpPoly, u32)>) {
    if f.is_constant() {
        return;
    }
    let q = f.characteristic();
    let df = f.derivative();
    if df.is_zero() {
        square_free_into(&pth_root(f), scale * q, out);
        return;
    }
    let mut c = f.gcd(&df);
    let mut w = f.exact_div(&c);
    let mut i = 1;
    while !w.is_constant() {
        let y = w.gcd(&c);
        let part = w.exact_div(&y);
        if !part.is_constant() {
            out.push((part, i * scale));
        }
        w = y;
        c = c.exact_div(&w);
        i += 1;
    }
    if !c.is_constant() {
        square_free_into(&pth_root(&c), scale * q, out);
    }
}

/// Splits a monic square-free polynomial into products of irreducibles of
/// equal degree, returned as `(product, degree)`.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let q = f.characteristic();
    let x = FpPoly::x(q);
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut out = Vec::new();
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = h.frobenius_mod(&rest);
        let g = rest.gcd(&(&h - &x));
        if !g.is_one() {
            rest = rest.exact_div(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if !rest.is_constant() {
        let deg = rest.degree().unwrap();
        out.push((rest, deg));
    }
    out
}

/// Splits a product of distinct monic irreducibles of degree `d`.
fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.degree().unwrap();
    if n == d {
        return vec![f.clone()];
    }
    let q = f.characteristic();
    loop {
        let coeffs: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q)).collect();
        let a = FpPoly::from_reduced(coeffs, q);
        if a.is_constant() {
            continue;
        }
        let b = if q == 2 {
            // Trace map a + a^2 + ... + a^(2^(d-1)).
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = t.mul_mod(&t, f);
                acc = &acc + &t;
            }
            acc
        } else {
            // a^((q^d - 1)/2) = (a^(1 + q + ... + q^(d-1)))^((q-1)/2).
            let mut t = a.rem(f);
            let mut norm = t.clone();
            for _ in 1..d {
                t = t.frobenius_mod(f);
                norm = norm.mul_mod(&t, f);
            }
            &norm.pow_mod(u64::from((q - 1) / 2), f) - &FpPoly::one(q)
        };
        let g = f.gcd(&b);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.exact_div(&g), d, rng));
            return out;
        }
    }
}

/// Rabin's test: `x^(q^n) = x mod f` and `gcd(x^(q^(n/r)) - x, f) = 1` for
/// every prime `r | n`.
pub fn is_irreducible(f: &FpPoly) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let (_, f) = f.monic();
    let q = f.characteristic();
    let x = FpPoly::x(q);
    let prime_divisors: Vec<usize> = factor(n as u128).expect("small").primes().iter().map(|&r| r as usize).collect();
    let mut checkpoints: Vec<usize> = prime_divisors.iter().map(|&r| n / r).collect();
    checkpoints.sort_unstable();
    let mut h = x.clone();
    let mut done = 0;
    for &k in &checkpoints {
        while done < k {
            h = h.frobenius_mod(&f);
            done += 1;
        }
        if !f.gcd(&(&h - &x)).is_one() {
            return false;
        }
    }
    while done < n {
        h = h.frobenius_mod(&f);
        done += 1;
    }
    h == x.rem(&f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> FpPoly {
        s.parse().unwrap()
    }

    /// Irreducibility by trial division over all monic polynomials of
    /// degree at most deg/2.
    fn irreducible_by_trial_division(f: &FpPoly) -> bool {
        let n = f.degree().unwrap();
        if n == 0 {
            return false;
        }
        let q = f.characteristic() as u64;
        for d in 1..=n / 2 {
            for idx in 0..q.pow(d as u32) {
                let mut coeffs: Vec<u64> = (0..d).map(|i| (idx / q.pow(i as u32)) % q).collect();
                coeffs.push(1);
                let g = FpPoly::new(coeffs, q as u32).unwrap();
                if f.rem(&g).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn examples() {
        let f = poly_factor(&p("1,0,1@2")).unwrap();
        assert_eq!(f.factors, vec![(p("1,1@2"), 2)]);

        let f = poly_factor(&p("1,1,0,0,1@2")).unwrap();
        assert_eq!(f.factors, vec![(p("1,1,0,0,1@2"), 1)]);
        assert!(irreducible_by_trial_division(&p("1,1,0,0,1@2")));

        let f = poly_factor(&FpPoly::from_signed(&[0, -1, 0, 1], 3).unwrap()).unwrap();
        assert_eq!(f.factors, vec![(p("0,1@3"), 1), (p("1,1@3"), 1), (p("2,1@3"), 1)]);

        assert!(matches!(poly_factor(&FpPoly::zero(3)), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn units_and_constants() {
        let f = poly_factor(&p("4@5")).unwrap();
        assert_eq!(f.unit, 4);
        assert!(f.factors.is_empty());
        let f = poly_factor(&p("2,4@5")).unwrap(); // 4(x + 3)
        assert_eq!(f.unit, 4);
        assert_eq!(f.factors, vec![(p("3,1@5"), 1)]);
    }

    #[test]
    fn inseparable_parts() {
        // (x^2 + x + 1)^4 · x^3 over F_2 has derivative-free pieces.
        let g = p("1,1,1@2");
        let f = &g.pow(4) * &p("0,0,0,1@2");
        let fac = poly_factor(&f).unwrap();
        assert_eq!(fac.factors, vec![(p("0,1@2"), 3), (g, 4)]);
        // (x + 1)^9 over F_3.
        let f = p("1,1@3").pow(9);
        assert_eq!(poly_factor(&f).unwrap().factors, vec![(p("1,1@3"), 9)]);
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for q in [2u32, 3, 5] {
            let max_deg = match q {
                2 => 8,
                3 => 5,
                _ => 4,
            };
            for d in 1..=max_deg {
                for idx in 0..(q as u64).pow(d) {
                    let mut coeffs: Vec<u64> = (0..d).map(|i| (idx / (q as u64).pow(i)) % q as u64).collect();
                    coeffs.push(1);
                    let f = FpPoly::new(coeffs, q).unwrap();
                    assert_eq!(is_irreducible(&f), irreducible_by_trial_division(&f), "{f}");
                }
            }
        }
    }

    #[test]
    fn seed_does_not_change_result() {
        let f = p("1,2,0,1,4,3,0,1,1,2,3@5");
        let a = poly_factor_seeded(&f, 1).unwrap();
        let b = poly_factor_seeded(&f, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.product(), f);
    }
}
