//! Weighted averages of multiplicities (wam) of ABC triples.
//!
//! For an integer with factorization `Π p_k^e_k`,
//! `wam(s) = Σ e_k (ln p_k)^s / Σ (ln p_k)^s`, a
//! meromorphic function of `s`. This crate factors integers, evaluates wam
//! and its poles, locates its critical abscissa and zeros, scans ABC triple
//! datasets, and runs the polynomial analogue over prime fields.

pub mod arith;
pub mod critical;
pub mod error;
pub mod ffpoly;
pub mod triples;
pub mod wamcore;
pub mod zeros;

pub use arith::{factor, factor_with_budget, gcd, is_prime, Factorization};
pub use critical::{critical_abscissa, is_wam_constant, wam_upper, CriticalProfile};
pub use error::{Error, Result};
pub use ffpoly::{
    count_irreducibles, cyclotomic_wam_formula, is_irreducible, mason_stothers_check, pigeonhole_triple, poly_factor,
    poly_wam, FpPoly, PigeonholeReport, PolyAbcTriple, PolyFactorization,
};
pub use num_complex::Complex64;
pub use triples::{
    acrit_scan, em_histogram, generate_triples, max_wam_heatmap, mersenne_family, parse_dataset, read_dataset,
    validate_triple, write_dataset, AbcTriple, HeatmapGrid,
};
pub use wamcore::{
    crude_em_bound, em_limit, mersenne_lower_bound_check, wam_at, wam_original, ComplexPoint, WamEvaluation,
    WamFunction, WamValue,
};
pub use zeros::{
    argument_principle_count, critical_line_probe, find_zeros, Classification, SearchRegion, ZeroRecord, ZeroSearch,
};
