use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Largest supported characteristic.
pub const MAX_CHARACTERISTIC: u32 = 1 << 16;

/// Dense polynomial over the prime field `F_q`, lowest degree first, with
/// trailing zeros stripped (the zero polynomial has no coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    q: u32,
    coeffs: Vec<u32>,
}

pub(crate) fn check_characteristic(q: u32) -> Result<()> {
    if q > MAX_CHARACTERISTIC || !is_prime(u128::from(q)) {
        return Err(Error::InvalidArgument(format!("characteristic {q} is not a prime <= 2^16")));
    }
    Ok(())
}

#[inline]
fn mul_mod(a: u32, b: u32, q: u32) -> u32 {
    ((u64::from(a) * u64::from(b)) % u64::from(q)) as u32
}

#[inline]
fn add_mod(a: u32, b: u32, q: u32) -> u32 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u32, b: u32, q: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

pub(crate) fn inv_mod(a: u32, q: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(q));
    // Fermat: a^(q-2).
    let (mut base, mut exp, mut acc) = (a % q, q - 2, 1u32);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

impl FpPoly {
    /// Coefficients are reduced modulo `q`.
    pub fn new(coeffs: Vec<u64>, q: u32) -> Result<Self> {
        check_characteristic(q)?;
        let coeffs = coeffs.into_iter().map(|c| (c % u64::from(q)) as u32).collect();
        Ok(Self::from_reduced(coeffs, q))
    }

    /// Signed coefficients, reduced into `[0, q)`.
    pub fn from_signed(coeffs: &[i64], q: u32) -> Result<Self> {
        check_characteristic(q)?;
        let coeffs = coeffs.iter().map(|&c| c.rem_euclid(i64::from(q)) as u32).collect();
        Ok(Self::from_reduced(coeffs, q))
    }

    pub(crate) fn from_reduced(mut coeffs: Vec<u32>, q: u32) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { q, coeffs }
    }

    pub fn zero(q: u32) -> Self {
        FpPoly { q, coeffs: Vec::new() }
    }

    pub fn constant(c: u32, q: u32) -> Self {
        Self::from_reduced(vec![c % q], q)
    }

    pub fn one(q: u32) -> Self {
        Self::constant(1, q)
    }

    /// `c · x^d`.
    pub fn monomial(c: u32, d: usize, q: u32) -> Self {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c % q;
        Self::from_reduced(coeffs, q)
    }

    pub fn x(q: u32) -> Self {
        Self::monomial(1, 1, q)
    }

    pub fn characteristic(&self) -> u32 {
        self.q
    }

    pub fn coefficients(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Option<u32> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coefficient() == Some(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: u32) -> Self {
        let q = self.q;
        Self::from_reduced(self.coeffs.iter().map(|&a| mul_mod(a, c % q, q)).collect(), q)
    }

    /// Monic associate and the leading coefficient that was divided out.
    pub fn monic(&self) -> (u32, Self) {
        match self.leading_coefficient() {
            None | Some(1) => (self.leading_coefficient().unwrap_or(0), self.clone()),
            Some(lc) => (lc, self.scale(inv_mod(lc, self.q))),
        }
    }

    pub fn derivative(&self) -> Self {
        let q = self.q;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, (i as u64 % u64::from(q)) as u32, q))
            .collect();
        Self::from_reduced(coeffs, q)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        FpPoly { q: self.q, coeffs }
    }

    fn same_field(&self, other: &Self) {
        assert_eq!(self.q, other.q, "polynomials over different fields");
    }

    /// Quotient and remainder. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        self.same_field(divisor);
        let q = self.q;
        let d = divisor.degree().expect("division by the zero polynomial");
        if self.coeffs.len() <= d {
            return (Self::zero(q), self.clone());
        }
        let inv = inv_mod(divisor.coeffs[d], q);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len() - d];
        for i in (0..quot.len()).rev() {
            let c = mul_mod(rem[i + d], inv, q);
            quot[i] = c;
            if c != 0 {
                for (j, &dc) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = sub_mod(rem[i + j], mul_mod(c, dc, q), q);
                }
            }
        }
        rem.truncate(d);
        (Self::from_reduced(quot, q), Self::from_reduced(rem, q))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Exact division; panics if `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Self) -> Self {
        let (quot, rem) = self.div_rem(divisor);
        assert!(rem.is_zero(), "inexact polynomial division");
        quot
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        self.same_field(other);
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic().1
    }

    pub fn mul_mod(&self, other: &Self, modulus: &Self) -> Self {
        (self * other).rem(modulus)
    }

    /// `self^exp mod modulus`.
    pub fn pow_mod(&self, mut exp: u64, modulus: &Self) -> Self {
        let mut base = self.rem(modulus);
        let mut acc = Self::one(self.q).rem(modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_mod(&base, modulus);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_mod(&base, modulus);
            }
        }
        acc
    }

    /// `self^q mod modulus`.
    pub fn frobenius_mod(&self, modulus: &Self) -> Self {
        self.pow_mod(u64::from(self.q), modulus)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(self.q), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: u32) -> u32 {
        let q = self.q;
        self.coeffs.iter().rev().fold(0, |acc, &c| add_mod(mul_mod(acc, x % q, q), c, q))
    }
}

impl Add for &FpPoly {
    type Output = FpPoly;

    fn add(self, rhs: &FpPoly) -> FpPoly {
        self.same_field(rhs);
        let q = self.q;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs =
            (0..n).map(|i| add_mod(*self.coeffs.get(i).unwrap_or(&0), *rhs.coeffs.get(i).unwrap_or(&0), q)).collect();
        FpPoly::from_reduced(coeffs, q)
    }
}

impl Sub for &FpPoly {
    type Output = FpPoly;

    fn sub(self, rhs: &FpPoly) -> FpPoly {
        self.same_field(rhs);
        let q = self.q;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs =
            (0..n).map(|i| sub_mod(*self.coeffs.get(i).unwrap_or(&0), *rhs.coeffs.get(i).unwrap_or(&0), q)).collect();
        FpPoly::from_reduced(coeffs, q)
    }
}

impl Neg for &FpPoly {
    type Output = FpPoly;

    fn neg(self) -> FpPoly {
        &FpPoly::zero(self.q) - self
    }
}

impl Mul for &FpPoly {
    type Output = FpPoly;

    fn mul(self, rhs: &FpPoly) -> FpPoly {
        self.same_field(rhs);
        let q = self.q;
        if self.is_zero() || rhs.is_zero() {
            return FpPoly::zero(q);
        }
        let q64 = u64::from(q);
        // Accumulate unreduced; flush before u64 could overflow.
        let flush_every = (u64::MAX / (q64 - 1).pow(2).max(1)).max(1) as usize;
        let mut acc = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                acc[i + j] += u64::from(a) * u64::from(b);
            }
            if (i + 1) % flush_every == 0 {
                acc.iter_mut().for_each(|c| *c %= q64);
            }
        }
        FpPoly::from_reduced(acc.into_iter().map(|c| (c % q64) as u32).collect(), q)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FpPoly {
            type Output = FpPoly;
            fn $m(self, rhs: FpPoly) -> FpPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Serialized as `c0,c1,...,cd@q`; the zero polynomial is `0@q`.
impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0@{}", self.q);
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "@{}", self.q)
    }
}

impl FromStr for FpPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (coeffs, q) = s.split_once('@').ok_or_else(|| Error::Parse(format!("{s:?}: missing '@characteristic'")))?;
        let q: u32 = q.parse().map_err(|e| Error::Parse(format!("characteristic {q:?}: {e}")))?;
        check_characteristic(q)?;
        let coeffs = coeffs
            .split(',')
            .map(|c| {
                let v: u32 = c.parse().map_err(|e| Error::Parse(format!("coefficient {c:?}: {e}")))?;
                if v >= q {
                    return Err(Error::Parse(format!("coefficient {v} not below {q}")));
                }
                Ok(v)
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(Self::from_reduced(coeffs, q))
    }
}
