//! The critical abscissa and the bound on |wam| to its right.
//!
//! Every zero `a + ib` of `f(s) = Σ (ln p_k)^s` satisfies
//! `Σ_{k<m} (ln p_k)^a >= (ln p_m)^a`. Dividing by `(ln p_m)^a` gives
//! `g(a) = Σ_{k<m} r_k^a` with every `r_k = ln p_k / ln p_m < 1`, so `g` is
//! strictly decreasing and `g(a) = 1` has exactly one root, `a_crit`. The
//! raw equation is not monotone term by term (`(ln 2)^a` decreases), which
//! is why the ratio form is solved here.
//!
//! The ratios do not depend on the base of the logarithm; all outputs still
//! record that natural logarithms are used.

use crate::arith::Factorization;
use crate::error::{Error, Result};

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOLERANCE: f64 = 1e-10;

const INITIAL_BRACKET: f64 = 64.0;

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalProfile {
    /// `None` when the factorization has a single prime.
    pub a_crit: Option<f64>,
    /// All exponents equal, so wam is constant.
    pub is_constant: bool,
    /// ω of the input.
    pub m: usize,
    pub e_m: u32,
    pub largest_prime: u128,
}

/// `ln p_k / ln p_m` for `k < m`.
fn log_ratios(f: &Factorization) -> Vec<f64> {
    let primes = f.primes();
    let top = (*primes.last().unwrap() as f64).ln();
    primes[..primes.len() - 1].iter().map(|&p| (p as f64).ln() / top).collect()
}

fn ratio_sum(ratios: &[f64], a: f64) -> f64 {
    ratios.iter().map(|&r| (a * r.ln()).exp()).sum()
}

/// Root of `Σ r_k^a = 1` for ratios in `(0, 1)`.
pub(crate) fn solve_ratio_equation(ratios: &[f64]) -> f64 {
    if ratios.len() == 1 {
        return 0.0;
    }
    let (mut lo, mut hi) = (-INITIAL_BRACKET, INITIAL_BRACKET);
    while ratio_sum(ratios, lo) <= 1.0 {
        lo *= 2.0;
    }
    while ratio_sum(ratios, hi) >= 1.0 {
        hi *= 2.0;
    }
    while hi - lo >= BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ratio_sum(ratios, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn critical_abscissa(f: &Factorization) -> Result<CriticalProfile> {
    if f.is_empty() {
        return Err(Error::EmptyFactorization);
    }
    let m = f.omega();
    let a_crit = (m >= 2).then(|| solve_ratio_equation(&log_ratios(f)));
    Ok(CriticalProfile {
        a_crit,
        is_constant: is_wam_constant(f),
        m,
        e_m: f.largest_exponent().unwrap(),
        largest_prime: f.largest_prime().unwrap(),
    })
}

/// `Σ e_k (ln p_k)^a / ((ln p_m)^a - Σ_{k<m} (ln p_k)^a)`, an upper bound on
/// `|wam(n, a + ib)|` for every `b` when `a > a_crit`.
pub fn wam_upper(f: &Factorization, a: f64) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::EmptyFactorization);
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument(format!("abscissa {a} is not finite")));
    }
    // Everything divided by (ln p_m)^a.
    let ratios = log_ratios(f);
    let tail = ratio_sum(&ratios, a);
    let denominator = 1.0 - tail;
    if denominator <= 0.0 {
        let a_crit = solve_ratio_equation(&ratios);
        return Err(Error::BelowCritical { a, a_crit });
    }
    let exps = f.exponents();
    let numerator = f64::from(exps[exps.len() - 1])
        + ratios.iter().zip(exps).map(|(&r, &e)| f64::from(e) * (a * r.ln()).exp()).sum::<f64>();
    Ok(numerator / denominator)
}

/// True iff all exponents are equal (n is a power of a squarefree number).
/// The empty factorization counts as constant.
pub fn is_wam_constant(f: &Factorization) -> bool {
    f.exponents().windows(2).all(|w| w[0] == w[1])
}
