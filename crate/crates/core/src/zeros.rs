//! Zeros of the WAM denominator `f(s) = Σ (ln p_k)^s`.
//!
//! Zeros are seeded from a uniform grid, polished with Newton's method,
//! deduplicated and then classified: a zero where the numerator also
//! vanishes is a removable singularity of wam, otherwise it is a pole.
//! [`argument_principle_count`] counts zeros in a rectangle by contour
//! quadrature of `f'/f` and serves as an independent check on the finder.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::Factorization;
use crate::critical::critical_abscissa;
use crate::error::{Error, Result};
use crate::wamcore::{ComplexPoint, WamFunction};

pub const DEFAULT_GRID_STEP: f64 = 0.05;
pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_NEWTON_ITERS: u32 = 100;
/// Relative to `Σ e_k |(ln p_k)^s|`.
pub const REMOVABLE_THRESHOLD: f64 = 1e-8;

/// Rectangle plus solver settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub grid_step: f64,
    pub newton_tol: f64,
    pub max_newton_iters: u32,
}

impl SearchRegion {
    /// Rectangle `[re.0, re.1] × [im.0, im.1]` with default solver settings.
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        SearchRegion {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
            grid_step: DEFAULT_GRID_STEP,
            newton_tol: DEFAULT_NEWTON_TOL,
            max_newton_iters: DEFAULT_MAX_NEWTON_ITERS,
        }
        .validated()
    }

    pub fn with_step(mut self, step: f64) -> Result<Self> {
        self.grid_step = step;
        self.validated()
    }

    pub fn with_newton(mut self, tol: f64, max_iters: u32) -> Result<Self> {
        self.newton_tol = tol;
        self.max_newton_iters = max_iters;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max, self.grid_step, self.newton_tol]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("search region must be finite".into()));
        }
        if !(self.re_min < self.re_max && self.im_min < self.im_max) {
            return Err(Error::InvalidArgument("search region is empty".into()));
        }
        if !(self.grid_step > 0.0 && self.newton_tol > 0.0 && self.max_newton_iters > 0) {
            return Err(Error::InvalidArgument("grid step, tolerance and iterations must be positive".into()));
        }
        Ok(self)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Grid points along one axis, covering `[lo - step, hi + step]`.
    fn padded_axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step).ceil() as usize + 3;
        (0..n).map(|i| lo - step + i as f64 * step).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Pole,
    Removable,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Pole => "pole",
            Classification::Removable => "removable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroRecord {
    pub location: ComplexPoint,
    /// |f| at the polished point.
    pub residual: f64,
    /// |N| at the polished point.
    pub numerator_magnitude: f64,
    pub classification: Classification,
}

/// Bookkeeping for seeds that did not end up as records.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ZeroDiagnostics {
    pub seeds: usize,
    pub converged: usize,
    pub no_convergence: usize,
    pub outside_region: usize,
    pub duplicates: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSearch {
    /// Sorted by `(re, im)`.
    pub zeros: Vec<ZeroRecord>,
    pub diagnostics: ZeroDiagnostics,
}

enum NewtonOutcome {
    Converged(Complex64, f64),
    Diverged,
}

fn newton(wf: &WamFunction, seed: Complex64, tol: f64, max_iters: u32) -> NewtonOutcome {
    let mut z = seed;
    let mut best: Option<(Complex64, f64)> = None;
    let mut polish = 0;
    for _ in 0..max_iters {
        let (f, df) = wf.denominator_with_derivative(z);
        let r = f.norm();
        if !r.is_finite() || df.norm() == 0.0 {
            break;
        }
        if r < tol {
            if best.is_none_or(|(_, br)| r < br) {
                best = Some((z, r));
            }
            // A couple of extra steps drive the location to full precision.
            polish += 1;
            if polish > 2 {
                break;
            }
        }
        let step = f / df;
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm().max(1.0) && best.is_some() {
            break;
        }
    }
    let (f, _) = wf.denominator_with_derivative(z);
    if f.norm() < tol && best.is_none_or(|(_, br)| f.norm() < br) {
        best = Some((z, f.norm()));
    }
    match best {
        Some((z, r)) => NewtonOutcome::Converged(z, r),
        None => NewtonOutcome::Diverged,
    }
}

fn sign_changes(values: &[f64]) -> bool {
    let pos = values.iter().any(|&v| v > 0.0);
    let neg = values.iter().any(|&v| v < 0.0);
    (pos && neg) || values.contains(&0.0)
}

/// Seed points: centres of 3×3 grid windows over which both `Re f` and
/// `Im f` change sign, plus grid-local minima of `|f|`.
fn seeds(wf: &WamFunction, region: &SearchRegion) -> Vec<Complex64> {
    let step = region.grid_step;
    let xs = SearchRegion::padded_axis(region.re_min, region.re_max, step);
    let ys = SearchRegion::padded_axis(region.im_min, region.im_max, step);
    let values: Vec<Vec<Complex64>> =
        ys.par_iter().map(|&y| xs.iter().map(|&x| wf.denominator(Complex64::new(x, y))).collect()).collect();
    (1..ys.len() - 1)
        .into_par_iter()
        .flat_map_iter(|j| {
            let values = &values;
            let xs = &xs;
            let ys = &ys;
            (1..xs.len() - 1).filter_map(move |i| {
                let mut re = [0.0; 9];
                let mut im = [0.0; 9];
                let mut k = 0;
                let centre = values[j][i].norm();
                let mut local_min = true;
                for dj in 0..3 {
                    for di in 0..3 {
                        let v = values[j + dj - 1][i + di - 1];
                        re[k] = v.re;
                        im[k] = v.im;
                        k += 1;
                        if (di, dj) != (1, 1) && v.norm() < centre {
                            local_min = false;
                        }
                    }
                }
                (local_min || (sign_changes(&re) && sign_changes(&im))).then(|| Complex64::new(xs[i], ys[j]))
            })
        })
        .collect()
}

/// Real parts are compared on a 1e-8 grid so that zeros on a common
/// vertical line sort by height despite rounding noise.
fn order_by_location(a: &ZeroRecord, b: &ZeroRecord) -> Ordering {
    let key = |z: &ZeroRecord| (z.location.re() * 1e8).round();
    key(a).total_cmp(&key(b)).then(a.location.im().total_cmp(&b.location.im()))
}

/// Locates the zeros of `f` inside `region`.
pub fn find_zeros(f: &Factorization, region: &SearchRegion) -> Result<ZeroSearch> {
    if f.omega() < 2 {
        return Err(Error::InvalidArgument("zeros need at least two distinct primes".into()));
    }
    let region = region.validated()?;
    let wf = WamFunction::new(f)?;
    Ok(find_zeros_of(&wf, &region))
}

pub(crate) fn find_zeros_of(wf: &WamFunction, region: &SearchRegion) -> ZeroSearch {
    let seeds = seeds(wf, region);
    let mut diagnostics = ZeroDiagnostics { seeds: seeds.len(), ..Default::default() };
    let outcomes: Vec<NewtonOutcome> =
        seeds.par_iter().map(|&z| newton(wf, z, region.newton_tol, region.max_newton_iters)).collect();

    let mut candidates = Vec::new();
    for outcome in outcomes {
        match outcome {
            NewtonOutcome::Converged(z, r) => {
                diagnostics.converged += 1;
                if region.contains(z) {
                    candidates.push((z, r));
                } else {
                    diagnostics.outside_region += 1;
                }
            }
            NewtonOutcome::Diverged => diagnostics.no_convergence += 1,
        }
    }

    // Deduplicate, keeping the smallest residual in each cluster.
    candidates.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let radius = 10.0 * region.newton_tol;
    let mut kept: Vec<(Complex64, f64)> = Vec::new();
    for (z, r) in candidates {
        match kept.iter_mut().rev().take_while(|(k, _)| z.re - k.re <= radius).find(|(k, _)| (z - *k).norm() <= radius)
        {
            Some(existing) => {
                diagnostics.duplicates += 1;
                if r < existing.1 {
                    *existing = (z, r);
                }
            }
            None => kept.push((z, r)),
        }
    }

    let mut zeros: Vec<ZeroRecord> = kept
        .into_iter()
        .map(|(z, residual)| {
            let numerator_magnitude = wf.numerator(z).norm();
            let threshold = REMOVABLE_THRESHOLD * wf.numerator_scale(z.re);
            let classification =
                if numerator_magnitude < threshold { Classification::Removable } else { Classification::Pole };
            ZeroRecord {
                location: ComplexPoint::new(z.re, z.im).expect("Newton iterates are finite"),
                residual,
                numerator_magnitude,
                classification,
            }
        })
        .collect();
    zeros.sort_by(order_by_location);
    ZeroSearch { zeros, diagnostics }
}

const GAUSS_ORDER: usize = 16;
const MIN_PANELS: usize = 4;
const MAX_PANELS: usize = 1 << 14;
/// Relative floor on |f| along the contour.
const CONTOUR_FLOOR: f64 = 1e-9;
/// Relative |f| on the finest contour below which a non-converging count
/// is blamed on a zero lying on the contour.
const BOUNDARY_SUSPECT: f64 = 1e-3;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Contour integral of f'/f and the node where |f| is smallest relative to
/// its scale.
fn contour_integral(
    wf: &WamFunction,
    corners: &[Complex64; 4],
    panels: usize,
    rule: &(Vec<f64>, Vec<f64>),
) -> Result<(Complex64, f64, Complex64)> {
    let (nodes, weights) = rule;
    let edges: Vec<(Complex64, Complex64)> = (0..4).map(|k| (corners[k], corners[(k + 1) % 4])).collect();
    let pieces: Vec<Result<(Complex64, f64, Complex64)>> = edges
        .par_iter()
        .flat_map_iter(|&(a, b)| (0..panels).map(move |p| (a, b, p)))
        .map(|(a, b, p)| {
            let h = (b - a) / panels as f64;
            let start = a + h * p as f64;
            let mut sum = Complex64::new(0.0, 0.0);
            let mut closest = (f64::INFINITY, start);
            let points = std::iter::once((start, 0.0))
                .chain(nodes.iter().zip(weights).map(|(&t, &w)| (start + h * (0.5 * (t + 1.0)), w)));
            for (z, w) in points {
                let (f, df) = wf.denominator_with_derivative(z);
                let relative = f.norm() / wf.denominator_scale(z.re);
                if relative < CONTOUR_FLOOR {
                    return Err(Error::BoundaryZero { re: z.re, im: z.im, magnitude: f.norm() });
                }
                if relative < closest.0 {
                    closest = (relative, z);
                }
                if w != 0.0 {
                    sum += df / f * w;
                }
            }
            Ok((sum * h * 0.5, closest.0, closest.1))
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut closest = (f64::INFINITY, corners[0]);
    for piece in pieces {
        let (sum, relative, z) = piece?;
        total += sum;
        if relative < closest.0 {
            closest = (relative, z);
        }
    }
    Ok((total, closest.0, closest.1))
}

/// Number of zeros of `f` inside `region`, from `(1/2πi) ∮ f'/f ds`.
///
/// Each edge is split into panels of 16-point Gauss–Legendre; the panel
/// count doubles from 4 until two successive totals snap to the same
/// integer.
pub fn argument_principle_count(f: &Factorization, region: &SearchRegion) -> Result<usize> {
    let region = region.validated()?;
    let wf = WamFunction::new(f)?;
    argument_principle_count_of(&wf, &region)
}

pub(crate) fn argument_principle_count_of(wf: &WamFunction, region: &SearchRegion) -> Result<usize> {
    let corners = [
        Complex64::new(region.re_min, region.im_min),
        Complex64::new(region.re_max, region.im_min),
        Complex64::new(region.re_max, region.im_max),
        Complex64::new(region.re_min, region.im_max),
    ];
    let rule = gauss_legendre(GAUSS_ORDER);
    let snap = |i: Complex64| {
        let count = i.im / (2.0 * PI);
        let rounded = count.round();
        ((count - rounded).abs() < 0.1 && (i.re / (2.0 * PI)).abs() < 0.1).then_some(rounded)
    };
    let mut previous = None;
    let mut panels = MIN_PANELS;
    let mut closest = (f64::INFINITY, corners[0]);
    while panels <= MAX_PANELS {
        let (integral, relative, z) = contour_integral(wf, &corners, panels, &rule)?;
        closest = (relative, z);
        let current = snap(integral);
        if let (Some(a), Some(b)) = (previous, current) {
            if a == b {
                return Ok(b.max(0.0) as usize);
            }
        }
        previous = current;
        panels *= 2;
    }
    if closest.0 < BOUNDARY_SUSPECT {
        let z = closest.1;
        return Err(Error::BoundaryZero { re: z.re, im: z.im, magnitude: wf.denominator(z).norm() });
    }
    Err(Error::NoConvergence("contour quadrature did not stabilise".into()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalLineReport {
    pub a_crit: f64,
    pub b_max: f64,
    pub samples_per_unit: u32,
    pub evaluations: usize,
    pub min_magnitude: f64,
    pub argmin_b: f64,
}

/// Scans `|f(a_crit + ib)|` at `b = j / samples_per_unit` for
/// `0 <= b <= b_max`. Larger `b_max` or denser sampling scans a superset of
/// points, so the reported minimum can only go down.
pub fn critical_line_probe(f: &Factorization, b_max: f64, samples_per_unit: u32) -> Result<CriticalLineReport> {
    if f.omega() < 3 {
        return Err(Error::InvalidArgument("the probe needs at least three distinct primes".into()));
    }
    if !(b_max.is_finite() && b_max >= 0.0) || samples_per_unit == 0 {
        return Err(Error::InvalidArgument("b_max must be finite and nonnegative, samples positive".into()));
    }
    let a_crit = critical_abscissa(f)?.a_crit.expect("m >= 3");
    let wf = WamFunction::new(f)?;
    let density = f64::from(samples_per_unit);
    let count = (b_max * density).floor() as usize + 1;
    let (min_magnitude, argmin_b) = (0..count)
        .into_par_iter()
        .map(|j| {
            let b = j as f64 / density;
            (wf.denominator(Complex64::new(a_crit, b)).norm(), b)
        })
        .reduce(
            || (f64::INFINITY, 0.0),
            |x, y| match x.0.total_cmp(&y.0) {
                Ordering::Less => x,
                Ordering::Greater => y,
                Ordering::Equal => {
                    if x.1 <= y.1 {
                        x
                    } else {
                        y
                    }
                }
            },
        );
    Ok(CriticalLineReport { a_crit, b_max, samples_per_unit, evaluations: count, min_magnitude, argmin_b })
}
