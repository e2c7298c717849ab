use proptest::prelude::*;
use rayon::prelude::*;
use wamlab::ffpoly::FpPoly;
use wamlab::triples::{read_dataset, validate_triple, write_dataset};
use wamlab::{
    count_irreducibles, critical_abscissa, cyclotomic_wam_formula, factor, is_irreducible, is_prime, poly_factor,
    wam_at, wam_original, wam_upper, Complex64, ComplexPoint, Factorization, WamValue,
};

fn value(f: &Factorization, re: f64, im: f64) -> WamValue {
    wam_at(f, ComplexPoint::new(re, im).unwrap()).unwrap().value
}

fn small_primes() -> Vec<u128> {
    (2..200u128).filter(|&p| is_prime(p)).collect()
}

/// Random factorizations with 1..=5 distinct primes below 200, small
/// enough to fit in u128.
fn factorization() -> impl Strategy<Value = Factorization> {
    prop::sample::subsequence(small_primes(), 1..=5)
        .prop_flat_map(|primes| {
            let n = primes.len();
            (Just(primes), prop::collection::vec(1u32..=4, n))
        })
        .prop_filter("fits in u128", |(primes, exps)| Factorization::from_parts(primes.clone(), exps.clone()).is_ok())
        .prop_map(|(primes, exps)| Factorization::from_parts(primes, exps).unwrap())
}

fn multi_prime() -> impl Strategy<Value = Factorization> {
    factorization().prop_filter("needs two primes", |f| f.omega() >= 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn factor_round_trip(n in 2u128..(1 << 40)) {
        let f = factor(n).unwrap();
        prop_assert_eq!(f.value(), n);
        let product: u128 = f.iter().map(|(p, e)| p.pow(e)).product();
        prop_assert_eq!(product, n);
        prop_assert!(f.primes().iter().all(|&p| is_prime(p)));
        prop_assert!(f.primes().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(f.omega() as u64 <= f.big_omega());
        prop_assert!(f.big_omega() as f64 <= (n as f64).log2() + 1e-9);
    }

    #[test]
    fn conjugate_symmetry(f in multi_prime(), re in -4.0f64..4.0, im in -30.0f64..30.0) {
        match (value(&f, re, im), value(&f, re, -im)) {
            (WamValue::Finite(a), WamValue::Finite(b)) => {
                prop_assert!((a - b.conj()).norm() <= 1e-9 * (1.0 + a.norm()));
            }
            (a, b) => prop_assert_eq!(a.is_pole(), b.is_pole()),
        }
    }

    #[test]
    fn value_at_one_and_zero(f in factorization()) {
        let at_one = value(&f, 1.0, 0.0).finite().unwrap();
        let original = wam_original(&f).unwrap();
        prop_assert!((at_one.re - original).abs() < 1e-9 * original);
        let at_zero = value(&f, 0.0, 0.0).finite().unwrap();
        let ratio = f.big_omega() as f64 / f.omega() as f64;
        prop_assert!((at_zero.re - ratio).abs() < 1e-12 * ratio);
    }

    #[test]
    fn tends_to_top_exponent(f in factorization()) {
        // The approach to e_m is geometric in the ratio of the top two logs;
        // keep that ratio away from 1 so a = 50 is far enough out.
        let primes = f.primes();
        if primes.len() >= 2 {
            let top = primes[primes.len() - 1] as f64;
            let next = primes[primes.len() - 2] as f64;
            prop_assume!(next.ln() / top.ln() <= 0.7);
        }
        let e_m = f64::from(*f.exponents().last().unwrap());
        let v = value(&f, 50.0, 0.0).finite().unwrap();
        prop_assert!((v.re - e_m).abs() < 1e-6, "{} vs {}", v.re, e_m);
    }

    #[test]
    fn upper_bound_is_monotone_and_bounds(f in multi_prime(), gap in 0.05f64..3.0, extra in 0.01f64..2.0, im in -50.0f64..50.0) {
        let a_crit = critical_abscissa(&f).unwrap().a_crit.unwrap();
        let a = a_crit + gap;
        let here = wam_upper(&f, a).unwrap();
        let further = wam_upper(&f, a + extra).unwrap();
        prop_assert!(further <= here * (1.0 + 1e-12));
        let v = value(&f, a, im);
        prop_assert!(v.norm() <= here * (1.0 + 1e-9));
    }

    #[test]
    fn critical_abscissa_ignores_exponents(f in multi_prime(), scale in 1u32..5) {
        let scaled = Factorization::from_parts(
            f.primes().to_vec(),
            f.exponents().iter().map(|e| e * scale).collect(),
        );
        prop_assume!(scaled.is_ok());
        let scaled = scaled.unwrap();
        let a = critical_abscissa(&f).unwrap().a_crit.unwrap();
        let b = critical_abscissa(&scaled).unwrap().a_crit.unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn poly_factor_round_trip(q in prop::sample::select(vec![2u32, 3, 5, 7, 13]), coeffs in prop::collection::vec(0u64..1000, 2..24)) {
        let f = FpPoly::new(coeffs, q).unwrap();
        prop_assume!(!f.is_zero());
        let fac = poly_factor(&f).unwrap();
        prop_assert_eq!(fac.product(), f);
        for (g, _) in &fac.factors {
            prop_assert!(g.is_monic() && is_irreducible(g));
        }
    }

    #[test]
    fn dataset_round_trip(pairs in prop::collection::vec((1u64..1_000_000, 1u64..1_000_000), 1..20)) {
        let triples: Vec<_> = pairs
            .into_iter()
            .filter_map(|(a, b)| validate_triple(a.into(), b.into(), u128::from(a) + u128::from(b)).ok())
            .collect();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &triples).unwrap();
        let report = read_dataset(buf.as_slice()).unwrap();
        prop_assert!(report.errors.is_empty());
        prop_assert_eq!(report.triples, triples);
    }
}

#[test]
fn irreducible_counts_match_enumeration() {
    for q in [2u32, 3, 5, 7, 11] {
        for n in 1u32.. {
            let total = u64::from(q).pow(n);
            if total > 1 << 18 {
                break;
            }
            let found = (0..total)
                .into_par_iter()
                .filter(|&i| {
                    let mut coeffs: Vec<u64> = (0..n).map(|j| (i / u64::from(q).pow(j)) % u64::from(q)).collect();
                    coeffs.push(1);
                    is_irreducible(&FpPoly::new(coeffs, q).unwrap())
                })
                .count() as u64;
            assert_eq!(found, count_irreducibles(q, n).unwrap(), "q = {q}, n = {n}");
        }
    }
}

#[test]
fn cyclotomic_formula_grows_with_p() {
    let primes: Vec<u64> = (3..2000u64).filter(|&p| is_prime(p.into())).collect();
    for s in [0.25, 0.5, 0.75] {
        let s = ComplexPoint::real(s).unwrap();
        let values: Vec<f64> =
            primes.iter().map(|&p| cyclotomic_wam_formula(p, s).unwrap().finite().unwrap().re).collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
    }
    let v = cyclotomic_wam_formula(7, ComplexPoint::new(0.5, 3.0).unwrap()).unwrap();
    assert!(matches!(v, WamValue::Finite(z) if z != Complex64::new(0.0, 0.0)));
}
