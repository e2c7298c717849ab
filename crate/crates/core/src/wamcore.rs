//! Evaluation of the weighted average multiplicity
//!
//! ```text
//! wam(n, s) = Σ e_k (ln p_k)^s / Σ (ln p_k)^s
//! ```
//!
//! for complex `s`. Each power is taken as `exp(s · ln(ln p))` with the real
//! natural logarithm. Since `ln p > 0` for every prime there is never a branch
//! choice to make, and every term is entire in `s`. Note that `ln ln 2 < 0`,
//! so the `p = 2` term *decreases* as `Re(s)` grows.
//!
//! The same machinery serves polynomials, where the height of an
//! irreducible factor is its degree instead of `ln p`.

use num_complex::Complex64;

use crate::arith::{factor, Factorization};
use crate::error::{Error, Result};

/// Relative threshold below which the denominator counts as a pole.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// A finite point `s = re + i·im` of the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPoint {
    re: f64,
    im: f64,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite point {re} + {im}i")));
        }
        Ok(ComplexPoint { re, im })
    }

    /// A point on the real axis.
    pub fn real(re: f64) -> Result<Self> {
        Self::new(re, 0.0)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn conj(&self) -> Self {
        ComplexPoint { re: self.re, im: -self.im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl TryFrom<Complex64> for ComplexPoint {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        ComplexPoint::new(z.re, z.im)
    }
}

/// Quotient value, or a marker that the denominator vanished.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WamValue {
    Finite(Complex64),
    Pole,
}

impl WamValue {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            WamValue::Finite(z) => Some(z),
            WamValue::Pole => None,
        }
    }

    pub fn is_pole(self) -> bool {
        matches!(self, WamValue::Pole)
    }

    /// Magnitude, infinite at a pole.
    pub fn norm(self) -> f64 {
        match self {
            WamValue::Finite(z) => z.norm(),
            WamValue::Pole => f64::INFINITY,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WamEvaluation {
    pub s: ComplexPoint,
    /// N(s) = Σ e_k h_k^s
    pub numerator: Complex64,
    /// f(s) = Σ h_k^s
    pub denominator: Complex64,
    pub value: WamValue,
}

/// Precomputed `ln(height)` and multiplicities for repeated evaluation.
///
/// For integers the height of `p` is `ln p`; for polynomials it is the
/// degree of the irreducible factor.
#[derive(Clone, Debug, PartialEq)]
pub struct WamFunction {
    log_heights: Vec<f64>,
    multiplicities: Vec<f64>,
}

impl WamFunction {
    pub fn new(f: &Factorization) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::EmptyFactorization);
        }
        let log_heights = f.primes().iter().map(|&p| (p as f64).ln().ln()).collect();
        let multiplicities = f.exponents().iter().map(|&e| f64::from(e)).collect();
        Ok(WamFunction { log_heights, multiplicities })
    }

    /// Builds the function from raw heights (all `>= 1` for polynomials,
    /// `> 0` in general) and their multiplicities.
    pub fn from_heights(heights: &[f64], multiplicities: &[u32]) -> Result<Self> {
        if heights.is_empty() {
            return Err(Error::EmptyFactorization);
        }
        if heights.len() != multiplicities.len() {
            return Err(Error::InvalidArgument("heights and multiplicities differ in length".into()));
        }
        if heights.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidArgument("heights must be positive and finite".into()));
        }
        Ok(WamFunction {
            log_heights: heights.iter().map(|h| h.ln()).collect(),
            multiplicities: multiplicities.iter().map(|&e| f64::from(e)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.log_heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_heights.is_empty()
    }

    pub fn log_heights(&self) -> &[f64] {
        &self.log_heights
    }

    fn term(log_height: f64, s: Complex64) -> Complex64 {
        (s * log_height).exp()
    }

    /// f(s) = Σ h_k^s.
    pub fn denominator(&self, s: Complex64) -> Complex64 {
        self.log_heights.iter().map(|&l| Self::term(l, s)).sum()
    }

    /// f'(s) = Σ h_k^s · ln h_k.
    pub fn denominator_derivative(&self, s: Complex64) -> Complex64 {
        self.log_heights.iter().map(|&l| Self::term(l, s) * l).sum()
    }

    /// f(s) and f'(s) together.
    pub fn denominator_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        self.log_heights.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(f, df), &l| {
            let t = Self::term(l, s);
            (f + t, df + t * l)
        })
    }

    /// N(s) = Σ e_k h_k^s.
    pub fn numerator(&self, s: Complex64) -> Complex64 {
        self.log_heights.iter().zip(&self.multiplicities).map(|(&l, &e)| Self::term(l, s) * e).sum()
    }

    /// Σ |h_k^s|, the natural scale of f at `s`.
    pub fn denominator_scale(&self, re: f64) -> f64 {
        self.log_heights.iter().map(|&l| (re * l).exp()).sum()
    }

    /// Σ e_k |h_k^s|, the natural scale of N at `s`.
    pub fn numerator_scale(&self, re: f64) -> f64 {
        self.log_heights.iter().zip(&self.multiplicities).map(|(&l, &e)| e * (re * l).exp()).sum()
    }

    /// Quotient only. Terms are rescaled by the largest `|h_k^s|` first, so
    /// the result stays finite even when the raw sums overflow.
    pub fn value(&self, s: Complex64) -> WamValue {
        let shift = self.log_heights.iter().map(|&l| s.re * l).fold(f64::NEG_INFINITY, f64::max);
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (&l, &e) in self.log_heights.iter().zip(&self.multiplicities) {
            let t = (s * l - shift).exp();
            num += t * e;
            den += t;
            scale += t.norm();
        }
        if den.norm() < POLE_THRESHOLD * scale {
            WamValue::Pole
        } else {
            WamValue::Finite(num / den)
        }
    }

    pub fn evaluate(&self, s: ComplexPoint) -> WamEvaluation {
        let z = s.to_complex();
        WamEvaluation { s, numerator: self.numerator(z), denominator: self.denominator(z), value: self.value(z) }
    }
}

/// wam(n, s) for the integer with factorization `f`.
pub fn wam_at(f: &Factorization, s: ComplexPoint) -> Result<WamEvaluation> {
    Ok(WamFunction::new(f)?.evaluate(s))
}

/// ln|n| / ln rad|n|, computed from the integer and its radical directly.
pub fn wam_original(f: &Factorization) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::EmptyFactorization);
    }
    let rad = f.radical()?;
    Ok((f.value() as f64).ln() / (rad as f64).ln())
}

/// e_m, the limit of wam(n, s) as Re(s) → +∞.
pub fn em_limit(f: &Factorization) -> Result<u32> {
    f.largest_exponent().ok_or(Error::EmptyFactorization)
}

/// Both sides of `e_m <= wam(n, 1) · ω(n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrudeBoundReport {
    pub e_m: u32,
    pub wam_one: f64,
    pub omega: usize,
    pub bound: f64,
    pub holds: bool,
}

pub fn crude_em_bound(f: &Factorization) -> Result<CrudeBoundReport> {
    let wf = WamFunction::new(f)?;
    let e_m = em_limit(f)?;
    let wam_one = match wf.value(Complex64::new(1.0, 0.0)) {
        WamValue::Finite(z) => z.re,
        WamValue::Pole => unreachable!("f(1) is a sum of positive reals"),
    };
    let bound = wam_one * f.omega() as f64;
    // Equality cases (prime powers) may land one ulp below.
    let holds = f64::from(e_m) <= bound * (1.0 + 1e-12);
    Ok(CrudeBoundReport { e_m, wam_one, omega: f.omega(), bound, holds })
}

/// Margins of the two inequalities checked for `m = 2^n (2^n - 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MersenneBoundReport {
    pub n: u32,
    pub s: ComplexPoint,
    pub odd_part: Factorization,
    /// Σ e_i (ln p_i)^{Re s} over the odd part.
    pub lemma_lhs: f64,
    /// n · (ln 3)^{Re s - 1} · ln 2.
    pub lemma_rhs: f64,
    /// |wam(m, s)|, infinite at a pole.
    pub wam_magnitude: f64,
    /// ½ (1 - (ln 2/ln 3)^{1 - Re s}) · wam(m, Re s).
    pub wam_lower_bound: f64,
}

impl MersenneBoundReport {
    pub fn lemma_margin(&self) -> f64 {
        self.lemma_rhs - self.lemma_lhs
    }

    pub fn wam_margin(&self) -> f64 {
        self.wam_magnitude - self.wam_lower_bound
    }

    pub fn lemma_holds(&self) -> bool {
        self.lemma_lhs < self.lemma_rhs
    }

    pub fn wam_bound_holds(&self) -> bool {
        self.wam_magnitude > self.wam_lower_bound
    }

    pub fn holds(&self) -> bool {
        self.lemma_holds() && self.wam_bound_holds()
    }
}

/// Factorization of `2^n (2^n - 1)` for `2 <= n <= 63`.
pub fn mersenne_abc(n: u32) -> Result<(Factorization, Factorization)> {
    if !(2..=63).contains(&n) {
        return Err(Error::InvalidArgument(format!("n = {n} outside [2, 63]")));
    }
    let odd = factor((1u128 << n) - 1)?;
    let two = Factorization::from_parts(vec![2], vec![n])?;
    Ok((two.multiply(&odd)?, odd))
}

/// Checks, for `m = 2^n (2^n - 1)` and `Re(s) < 1`,
///
/// 1. `Σ e_i (ln p_i)^{Re s} < n (ln 3)^{Re s - 1} ln 2` over the odd part;
/// 2. `|wam(m, s)| > ½ (1 - (ln 2/ln 3)^{1 - Re s}) wam(m, Re s)`.
pub fn mersenne_lower_bound_check(n: u32, s: ComplexPoint) -> Result<MersenneBoundReport> {
    if s.re() >= 1.0 {
        return Err(Error::InvalidArgument(format!("Re(s) = {} must be below 1", s.re())));
    }
    let (abc, odd) = mersenne_abc(n)?;
    let a = s.re();
    let lemma_lhs = odd.iter().map(|(p, e)| f64::from(e) * (p as f64).ln().powf(a)).sum();
    let (ln2, ln3) = (2f64.ln(), 3f64.ln());
    let lemma_rhs = f64::from(n) * ln3.powf(a - 1.0) * ln2;

    let wf = WamFunction::new(&abc)?;
    let wam_magnitude = wf.value(s.to_complex()).norm();
    let wam_real = match wf.value(Complex64::new(a, 0.0)) {
        WamValue::Finite(z) => z.re,
        WamValue::Pole => unreachable!("f(a) > 0 on the real axis"),
    };
    let wam_lower_bound = 0.5 * (1.0 - (ln2 / ln3).powf(1.0 - a)) * wam_real;
    Ok(MersenneBoundReport { n, s, odd_part: odd, lemma_lhs, lemma_rhs, wam_magnitude, wam_lower_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im).unwrap()
    }

    fn value(n: u128, s: ComplexPoint) -> Complex64 {
        wam_at(&factor(n).unwrap(), s).unwrap().value.finite().unwrap()
    }

    #[test]
    fn examples_for_72_and_240() {
        let (l2, l3, l5) = (2f64.ln(), 3f64.ln(), 5f64.ln());
        let v = value(72, pt(1.0, 0.0));
        assert_relative_eq!(v.re, (3.0 * l2 + 2.0 * l3) / (l2 + l3), epsilon = 1e-12);
        assert_relative_eq!(v.re, 2.38686, epsilon = 1e-5);
        assert_eq!(v.im, 0.0);
        assert_eq!(value(72, pt(0.0, 0.0)).re, 2.5);
        let v = value(240, pt(1.0, 0.0));
        assert_relative_eq!(v.re, (4.0 * l2 + l3 + l5) / 30f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(v.re, 1.61139, epsilon = 1e-5);
    }

    #[test]
    fn unit_is_rejected() {
        let one = factor(1).unwrap();
        assert!(matches!(wam_at(&one, pt(1.0, 0.0)), Err(Error::EmptyFactorization)));
        assert!(wam_original(&one).is_err());
        assert!(em_limit(&one).is_err());
    }

    #[test]
    fn non_finite_points_are_rejected() {
        assert!(ComplexPoint::new(f64::NAN, 0.0).is_err());
        assert!(ComplexPoint::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn original_form() {
        assert_relative_eq!(wam_original(&factor(72).unwrap()).unwrap(), 72f64.ln() / 6f64.ln());
        assert_eq!(wam_original(&factor(6).unwrap()).unwrap(), 1.0);
        assert_relative_eq!(wam_original(&factor(8).unwrap()).unwrap(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn em_examples() {
        assert_eq!(em_limit(&factor(72).unwrap()).unwrap(), 2);
        assert_eq!(em_limit(&factor(12).unwrap()).unwrap(), 1);
        assert_eq!(em_limit(&factor(2048 * 2047).unwrap()).unwrap(), 1);
    }

    #[test]
    fn crude_bound_examples() {
        let r = crude_em_bound(&factor(72).unwrap()).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.bound, 2.0 * 2.386_86, epsilon = 1e-4);
        let r = crude_em_bound(&factor(8).unwrap()).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.bound, 3.0, epsilon = 1e-12);
        let r = crude_em_bound(&factor(30).unwrap()).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.bound, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn pole_marker_for_two_term_zero() {
        // f(s) = (ln 2)^s + (ln 3)^s vanishes at s = iπ / ln(ln3/ln2).
        let b = std::f64::consts::PI / (3f64.ln() / 2f64.ln()).ln();
        let eval = wam_at(&factor(72).unwrap(), pt(0.0, b)).unwrap();
        assert!(eval.value.is_pole());
        assert!(eval.denominator.norm() < 1e-12);
    }

    #[test]
    fn mersenne_examples() {
        let r = mersenne_lower_bound_check(11, pt(0.5, 0.0)).unwrap();
        assert_eq!(r.odd_part.primes(), &[23, 89]);
        assert!(r.holds(), "{r:?}");

        let r = mersenne_lower_bound_check(2, pt(0.0, 0.0)).unwrap();
        assert_eq!(r.lemma_lhs, 1.0);
        assert_relative_eq!(r.lemma_rhs, 2.0 * 2f64.ln() / 3f64.ln(), epsilon = 1e-12);
        assert!(r.holds());

        let r = mersenne_lower_bound_check(4, pt(0.9, 1.0)).unwrap();
        assert_eq!(r.odd_part.primes(), &[3, 5]);
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn mersenne_rejects_bad_input() {
        assert!(mersenne_lower_bound_check(1, pt(0.0, 0.0)).is_err());
        assert!(mersenne_lower_bound_check(64, pt(0.0, 0.0)).is_err());
        assert!(mersenne_lower_bound_check(5, pt(1.0, 0.0)).is_err());
    }

    #[test]
    fn scaled_value_survives_overflow() {
        // Raw sums overflow at Re(s) = 8000 but the quotient tends to e_m.
        let f = factor(72).unwrap();
        let eval = wam_at(&f, pt(8000.0, 3.0)).unwrap();
        assert!(!eval.denominator.norm().is_finite());
        let v = eval.value.finite().unwrap();
        assert_relative_eq!(v.re, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn polynomial_heights() {
        // abc = x^3 (x + 1): heights 1, 1 and multiplicities 3, 1.
        let wf = WamFunction::from_heights(&[1.0, 1.0], &[3, 1]).unwrap();
        assert_eq!(wf.value(Complex64::new(0.0, 0.0)), WamValue::Finite(Complex64::new(2.0, 0.0)));
        assert!(WamFunction::from_heights(&[], &[]).is_err());
        assert!(WamFunction::from_heights(&[0.0], &[1]).is_err());
    }
}
