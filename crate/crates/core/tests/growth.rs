use num_complex::Complex64;
use qfa_gk::gkdim::{gk_report, DegreeMethod, GrowthConfig};
use qfa_gk::weyl::{Family, WeylGroup};
use qfa_gk::{AlgebraSpec, Error};

fn spec(f: Family, n: usize, q: f64) -> AlgebraSpec {
    AlgebraSpec::trivial_torus(WeylGroup::new(f, n).unwrap(), q).unwrap()
}

fn cfg(kmax: usize) -> GrowthConfig {
    GrowthConfig { kmax, ..Default::default() }
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn identity_word_is_one_dimensional() {
    let r = gk_report(&spec(Family::C, 2, 0.5), &[], &cfg(10)).unwrap();
    assert_eq!(r.dims, vec![1; 11]);
    assert_eq!(r.estimated_gkdim, 0);
    assert_eq!(r.degree_method, DegreeMethod::Constant);
    assert!(r.pass);
}

#[test]
fn su2_grows_linearly() {
    let r = gk_report(&spec(Family::A, 1, 0.5), &[1], &cfg(12)).unwrap();
    assert_eq!(r.dims, (1..=13).collect::<Vec<_>>());
    assert_eq!(r.estimated_gkdim, 1);
    assert!(r.pass && r.lower_bound_holds && r.upper_bound_holds);
}

#[test]
fn a3_longest_element_is_binomial() {
    let r = gk_report(&spec(Family::A, 3, 0.5), &[1, 2, 1, 3, 2, 1], &cfg(10)).unwrap();
    let oracle: Vec<usize> = (0..=10).map(|k| binom(k + 6, 6)).collect();
    assert_eq!(r.dims, oracle);
    assert_eq!(r.estimated_gkdim, 6);
    assert!(r.pass);
}

#[test]
fn c2_battery_matches_lengths() {
    let g = WeylGroup::new(Family::C, 2).unwrap();
    let mut estimates = Vec::new();
    for (w, len) in g.enumerate() {
        let word = g.normal_form(&w).unwrap().word();
        let r = gk_report(&spec(Family::C, 2, 0.5), &word, &cfg(10)).unwrap();
        assert_eq!(r.estimated_gkdim, len, "{word:?}: {:?}", r.dims);
        assert!(r.pass, "{word:?}: {:?}", r.certificate.failures);
        assert!(r.lower_bound_holds && r.upper_bound_holds);
        estimates.push(r.estimated_gkdim);
    }
    estimates.sort_unstable();
    assert_eq!(estimates, vec![0, 1, 1, 2, 2, 3, 3, 4]);
}

#[test]
fn reduced_word_choice_does_not_matter() {
    let a = spec(Family::A, 3, 0.5);
    let x = gk_report(&a, &[1, 2, 1, 3], &cfg(9)).unwrap();
    let y = gk_report(&a, &[2, 1, 2, 3], &cfg(9)).unwrap();
    assert_eq!(x.dims, y.dims);
    let d = spec(Family::D, 4, 0.5);
    let x = gk_report(&d, &[1, 2, 3, 4, 2], &cfg(8)).unwrap();
    let y = gk_report(&d, &[1, 2, 4, 3, 2], &cfg(8)).unwrap();
    assert_eq!(x.dims, y.dims);
}

#[test]
fn torus_point_does_not_matter() {
    let g = WeylGroup::new(Family::C, 2).unwrap();
    let t = vec![Complex64::from_polar(1.0, 0.7), Complex64::from_polar(1.0, -2.1)];
    let twisted = AlgebraSpec::new(g, 0.5, t).unwrap();
    let word = [2, 1, 2];
    let x = gk_report(&twisted, &word, &cfg(10)).unwrap();
    let y = gk_report(&spec(Family::C, 2, 0.5), &word, &cfg(10)).unwrap();
    assert_eq!(x.dims, y.dims);
}

#[test]
fn quotient_never_exceeds_full() {
    let a = spec(Family::A, 3, 0.5);
    let q = gk_report(&a, &[3, 2, 1], &GrowthConfig { kmax: 10, quotient_m: Some(2), ..Default::default() }).unwrap();
    let full = gk_report(&a, &[3, 2, 1], &cfg(10)).unwrap();
    assert!(q.dims.iter().zip(&full.dims).all(|(x, y)| x <= y));
    assert_eq!(q.estimated_gkdim, 3);
    assert_eq!(q.certificate_in_quotient, Some(true));
    assert!(q.pass);
}

#[test]
fn quotient_rejects_bad_input() {
    let a = spec(Family::A, 3, 0.5);
    let bad = GrowthConfig { kmax: 8, quotient_m: Some(2), ..Default::default() };
    // s1 s3 has left descent s1, which lies in S_2
    assert!(matches!(gk_report(&a, &[1, 3], &bad), Err(Error::Quotient(_))));
    assert!(matches!(gk_report(&spec(Family::D, 4, 0.5), &[1], &bad), Err(Error::Quotient(_))));
}

#[test]
fn csv_lists_dims() {
    let r = gk_report(&spec(Family::A, 1, 0.5), &[1], &cfg(8)).unwrap();
    assert!(r.to_csv().starts_with("k,dim\n0,1\n1,2\n"));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        // monotone, starts at 1, sits between the bounds, independent of t
        #[test]
        fn growth_invariants(fam in prop_oneof![Just(Family::A), Just(Family::C)], pick in 0usize..64, q in 0.3f64..0.7, phases in proptest::collection::vec(-3.1f64..3.1, 2)) {
            let g = WeylGroup::new(fam, 2).unwrap();
            let elems = g.enumerate();
            let (w, _) = &elems[pick % elems.len()];
            let word = g.normal_form(w).unwrap().word();
            let t = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
            let r = gk_report(&AlgebraSpec::new(g, q, t).unwrap(), &word, &cfg(8)).unwrap();
            prop_assert_eq!(r.dims[0], 1);
            prop_assert!(r.dims.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(r.upper_bound_holds && r.lower_bound_holds);
            let plain = gk_report(&spec(fam, 2, q), &word, &cfg(8)).unwrap();
            prop_assert_eq!(r.dims, plain.dims);
        }
    }
}
