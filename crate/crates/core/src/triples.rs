//! ABC triples over the integers.
//!
//! Dataset files hold one triple per line as whitespace-separated `a b c`
//! (spaces or tabs, LF or CRLF). Blank lines are ignored and `#` starts a
//! comment that runs to the end of the line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{factor, gcd, Factorization};
use crate::critical::{critical_abscissa, wam_upper};
use crate::error::{Error, Result};
use crate::wamcore::{WamFunction, WamValue};

pub const DEFAULT_MIN_QUALITY: f64 = 1.0;
pub const DEFAULT_HEATMAP_CAP: f64 = 1e6;

/// A coprime triple `a + b = c` with `a <= b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbcTriple {
    pub a: u128,
    pub b: u128,
    pub c: u128,
    /// Factorization of `a·b·c`.
    pub abc: Factorization,
    /// ln c / ln rad(abc)
    pub quality: f64,
    pub e_m: u32,
}

impl AbcTriple {
    pub fn radical(&self) -> u128 {
        self.abc.radical().expect("radical divides abc")
    }
}

/// Validates `a + b = c` and pairwise coprimality, swapping `a` and `b` if
/// needed so that `a <= b`.
pub fn validate_triple(a: u128, b: u128, c: u128) -> Result<AbcTriple> {
    if a == 0 || b == 0 || a.checked_add(b) != Some(c) {
        return Err(Error::NotATriple { a, b, c });
    }
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if gcd(a, b) != 1 || gcd(b, c) != 1 || gcd(a, c) != 1 {
        return Err(Error::NotCoprime);
    }
    // Coprime parts factor independently.
    let abc = factor(a)?.multiply(&factor(b)?)?.multiply(&factor(c)?)?;
    Ok(from_factorization(a, b, c, abc))
}

fn from_factorization(a: u128, b: u128, c: u128, abc: Factorization) -> AbcTriple {
    let rad = abc.radical().expect("radical divides abc");
    let quality = (c as f64).ln() / (rad as f64).ln();
    let e_m = abc.largest_exponent().expect("c >= 2");
    AbcTriple { a, b, c, abc, quality, e_m }
}

/// A dataset line that failed to parse or validate.
#[derive(Debug)]
pub struct LineError {
    pub line: usize,
    pub text: String,
    pub error: Error,
}

/// Streams triples from a dataset reader, one `Result` per non-blank,
/// non-comment line.
pub struct DatasetReader<R> {
    lines: io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> DatasetReader<R> {
    pub fn new(reader: R) -> Self {
        DatasetReader { lines: reader.lines(), line_no: 0 }
    }
}

fn parse_line(content: &str) -> Result<(u128, u128, u128)> {
    let fields: Vec<&str> = content.split([' ', '\t']).filter(|f| !f.is_empty()).collect();
    if fields.len() != 3 {
        return Err(Error::Parse(format!("expected 3 fields, found {}", fields.len())));
    }
    let parse = |s: &str| s.parse::<u128>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
    Ok((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?))
}

impl<R: BufRead> Iterator for DatasetReader<R> {
    /// The outer `io::Result` aborts the stream; the inner one is per line.
    type Item = io::Result<std::result::Result<AbcTriple, LineError>>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let raw = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e)),
            };
            self.line_no += 1;
            let raw = raw.strip_suffix('\r').unwrap_or(&raw);
            let content = raw.split('#').next().unwrap_or("");
            if content.trim_matches([' ', '\t']).is_empty() {
                continue;
            }
            let parsed = parse_line(content).and_then(|(a, b, c)| validate_triple(a, b, c));
            let line = self.line_no;
            return Some(Ok(parsed.map_err(|error| LineError { line, text: raw.to_string(), error })));
        }
    }
}

#[derive(Debug, Default)]
pub struct DatasetReport {
    pub triples: Vec<AbcTriple>,
    pub errors: Vec<LineError>,
}

/// Reads a whole dataset file. IO errors abort; bad lines are collected.
pub fn parse_dataset(path: impl AsRef<Path>) -> Result<DatasetReport> {
    read_dataset(BufReader::new(File::open(path)?))
}

pub fn read_dataset<R: BufRead>(reader: R) -> Result<DatasetReport> {
    let mut report = DatasetReport::default();
    for item in DatasetReader::new(reader) {
        match item? {
            Ok(t) => report.triples.push(t),
            Err(e) => report.errors.push(e),
        }
    }
    Ok(report)
}

pub fn write_dataset<W: Write>(mut out: W, triples: &[AbcTriple]) -> io::Result<()> {
    for t in triples {
        writeln!(out, "{} {} {}", t.a, t.b, t.c)?;
    }
    Ok(())
}

/// Smallest-prime-factor sieve, used to get radicals and factorizations of
/// every integer up to `limit` without trial division.
struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                for j in (i..=limit).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        Sieve { spf }
    }

    fn factorization(&self, mut n: usize) -> Factorization {
        let mut primes = Vec::new();
        let mut exponents: Vec<u32> = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            if primes.last() == Some(&(p as u128)) {
                *exponents.last_mut().unwrap() += 1;
            } else {
                primes.push(p as u128);
                exponents.push(1);
            }
            n /= p;
        }
        Factorization::from_parts(primes, exponents).expect("sieve factors are valid")
    }

    fn radicals(&self) -> Vec<u64> {
        let mut rad = vec![1u64; self.spf.len()];
        for n in 2..self.spf.len() {
            let p = self.spf[n] as usize;
            let m = n / p;
            rad[n] = if m.is_multiple_of(p) { rad[m] } else { rad[m] * p as u64 };
        }
        rad
    }
}

/// All coprime triples with `c <= c_max` and quality at least
/// `min_quality`, sorted by descending quality, then by `(c, a)`.
pub fn generate_triples(c_max: u64, min_quality: f64) -> Result<Vec<AbcTriple>> {
    if c_max > 10_000_000 {
        return Err(Error::InvalidArgument(format!("c_max = {c_max} exceeds 10^7")));
    }
    if c_max < 2 {
        return Ok(Vec::new());
    }
    let limit = c_max as usize;
    let sieve = Sieve::new(limit);
    let rad = sieve.radicals();

    // Candidates x with rad(x) small enough to possibly reach the quality
    // threshold, sorted by radical. For min_quality <= 0 every pair counts.
    let mut by_radical: Vec<u32> = (1..=limit as u32).collect();
    by_radical.sort_by_key(|&x| (rad[x as usize], x));

    let pairs: Vec<(u64, u64, u64)> = (2..=c_max)
        .into_par_iter()
        .flat_map_iter(|c| {
            let rc = rad[c as usize] as f64;
            // rad(a)·rad(b)·rad(c) <= c^(1/q) is required; rad(b) >= 1.
            let budget =
                if min_quality > 0.0 { (c as f64).powf(1.0 / min_quality) * (1.0 + 1e-9) / rc } else { f64::INFINITY };
            let rad = &rad;
            by_radical.iter().take_while(move |&&x| (rad[x as usize] as f64) <= budget).filter_map(move |&x| {
                let x = u64::from(x);
                if x > c / 2 || x >= c {
                    return None;
                }
                let (a, b) = (x, c - x);
                if gcd(u128::from(a), u128::from(c)) != 1 {
                    return None;
                }
                let r = rad[a as usize] as f64 * rad[b as usize] as f64 * rc;
                (r <= budget * rc).then_some((a, b, c))
            })
        })
        .collect();

    let mut triples: Vec<AbcTriple> = pairs
        .into_par_iter()
        .map(|(a, b, c)| {
            let abc = sieve
                .factorization(a as usize)
                .multiply(&sieve.factorization(b as usize))
                .and_then(|ab| ab.multiply(&sieve.factorization(c as usize)))
                .expect("product of values below 10^7 fits in u128");
            from_factorization(a.into(), b.into(), c.into(), abc)
        })
        .filter(|t| t.quality >= min_quality)
        .collect();
    triples.sort_by(|x, y| y.quality.total_cmp(&x.quality).then(x.c.cmp(&y.c)).then(x.a.cmp(&y.a)));
    Ok(triples)
}

/// Count of triples per e_m of `abc`.
pub fn em_histogram(triples: &[AbcTriple]) -> BTreeMap<u32, usize> {
    let mut hist = BTreeMap::new();
    for t in triples {
        *hist.entry(t.e_m).or_insert(0) += 1;
    }
    hist
}

/// Equally spaced points from `lo` to `hi` (inclusive) with spacing close
/// to `step`. Symmetric ranges produce exactly negated points.
pub fn axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
        return Err(Error::InvalidArgument(format!("bad axis {lo}:{hi} step {step}")));
    }
    let intervals = ((hi - lo) / step).round().max(0.0) as usize;
    if intervals == 0 {
        return Ok(vec![lo]);
    }
    let n = intervals as f64;
    Ok((0..=intervals).map(|i| (lo * (intervals - i) as f64 + hi * i as f64) / n).collect())
}

/// `log10 min(cap, max_t |wam(abc_t, s)|)` on a grid over the complex plane.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatmapGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// `cells[j][i]` is the value at `re_axis[i] + i·im_axis[j]`.
    pub cells: Vec<Vec<f64>>,
    pub cap: f64,
}

/// Builds the heatmap. Poles count as `cap`; cells are also floored at
/// `1/cap` so that exact zeros of the numerator stay finite.
pub fn max_wam_heatmap(
    triples: &[AbcTriple],
    re: (f64, f64),
    im: (f64, f64),
    step: f64,
    cap: f64,
) -> Result<HeatmapGrid> {
    if triples.is_empty() {
        return Err(Error::InvalidArgument("heatmap needs at least one triple".into()));
    }
    if !(cap.is_finite() && cap > 1.0) {
        return Err(Error::InvalidArgument(format!("cap {cap} must be finite and above 1")));
    }
    if !(re.0 < re.1 && im.0 < im.1) {
        return Err(Error::InvalidArgument("heatmap region is empty".into()));
    }
    let re_axis = axis(re.0, re.1, step)?;
    let im_axis = axis(im.0, im.1, step)?;
    let functions: Vec<WamFunction> = triples.iter().map(|t| WamFunction::new(&t.abc)).collect::<Result<_>>()?;
    let cells = im_axis
        .par_iter()
        .map(|&y| {
            re_axis
                .iter()
                .map(|&x| {
                    let s = Complex64::new(x, y);
                    let max = functions
                        .iter()
                        .map(|wf| match wf.value(s) {
                            WamValue::Finite(z) if z.norm().is_finite() => z.norm(),
                            _ => f64::INFINITY,
                        })
                        .fold(0.0, f64::max);
                    max.clamp(1.0 / cap, cap).log10()
                })
                .collect()
        })
        .collect();
    Ok(HeatmapGrid { re_axis, im_axis, cells, cap })
}

/// An exponent whose Mersenne triple could not be built.
pub type SkippedExponent = (u32, Error);

/// Triples `(1, 2^n - 1, 2^n)` for `2 <= n <= n_max`. Exponents whose
/// factorization fails are reported in the second list, never fatal.
pub fn mersenne_family(n_max: u32) -> Result<(Vec<AbcTriple>, Vec<SkippedExponent>)> {
    if !(2..=63).contains(&n_max) {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} outside [2, 63]")));
    }
    let mut triples = Vec::new();
    let mut skipped = Vec::new();
    for n in 2..=n_max {
        let c = 1u128 << n;
        match validate_triple(1, c - 1, c) {
            Ok(t) => triples.push(t),
            Err(e) => skipped.push((n, e)),
        }
    }
    Ok((triples, skipped))
}

/// One row of the a_crit scan.
#[derive(Clone, Debug, PartialEq)]
pub struct AcritRow {
    pub a: u128,
    pub b: u128,
    pub c: u128,
    pub m: usize,
    pub largest_prime: u128,
    pub a_crit: Option<f64>,
}

pub fn acrit_scan(triples: &[AbcTriple]) -> Vec<AcritRow> {
    triples
        .par_iter()
        .map(|t| {
            let profile = critical_abscissa(&t.abc).expect("abc > 1");
            AcritRow {
                a: t.a,
                b: t.b,
                c: t.c,
                m: profile.m,
                largest_prime: profile.largest_prime,
                a_crit: profile.a_crit,
            }
        })
        .collect()
}

/// Largest `wam_upper(abc, a)` over the set, `None` if `a` is not above
/// every a_crit.
pub fn max_wam_upper(triples: &[AbcTriple], a: f64) -> Option<f64> {
    triples.iter().map(|t| wam_upper(&t.abc, a).ok()).try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
}
