use qfa_gk::corep::{AlgebraSpec, WordAction};
use qfa_gk::gkdim::lemmas::{block_ranks, tail_map, traced_r_map, verify_part_operators, verify_unique_path, window, Check};
use qfa_gk::gkdim::hitting::{hitting_polynomials_with, SigmaConvention};
use qfa_gk::weyl::{Family, NormalForm, WeylGroup};

fn failures(checks: &[Check]) -> Vec<String> {
    checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect()
}

fn run_element(g: &WeylGroup, nf: &NormalForm, conv: SigmaConvention) -> Vec<String> {
    let n = g.rank();
    let mut bad = Vec::new();
    let spec = AlgebraSpec::trivial_torus(*g, 0.5).unwrap();
    for i in 0..n {
        let tail_word: Vec<usize> = nf.parts()[i..].iter().flat_map(|p| p.word.iter().copied()).collect();
        let m = tail_map(g, nf, i, n).unwrap();
        let traced = traced_r_map(g, &tail_word).unwrap();
        let (lo, hi) = window(g, i);
        if lo <= hi && m.images != traced[lo - 1..hi] {
            bad.push(format!("{nf} i={i}: case rule {:?} traced {:?}", m.images, &traced[lo - 1..hi]));
        }
        if lo <= hi {
            let act = WordAction::new(&spec, &tail_word).unwrap();
            bad.extend(failures(&verify_unique_path(&act, &m, &format!("{nf} i={i}")).unwrap()));
        }
    }
    let act = WordAction::new(&spec, &nf.word()).unwrap();
    for i in block_ranks(g) {
        let checks = verify_part_operators(&act, nf, i, 3).unwrap();
        bad.extend(failures(&checks).into_iter().map(|f| format!("{nf}: {f}")));
    }
    let cert = hitting_polynomials_with(&act, nf, 11, conv).unwrap();
    bad.extend(cert.failures.iter().map(|f| format!("{nf}: hitting {f}")));
    bad
}

fn run_group(f: Family, n: usize, conv: SigmaConvention) -> Vec<String> {
    let g = WeylGroup::new(f, n).unwrap();
    g.enumerate().iter().flat_map(|(w, _)| run_element(&g, &g.normal_form(w).unwrap(), conv)).collect()
}

#[test]
fn lemma_identities_a2_a3() {
    let bad: Vec<String> = [2, 3].iter().flat_map(|&n| run_group(Family::A, n, SigmaConvention::Literal)).collect();
    assert!(bad.is_empty(), "{} failures, first: {:#?}", bad.len(), &bad[..bad.len().min(10)]);
}

#[test]
fn lemma_identities_c2_c3() {
    let bad: Vec<String> = [2, 3].iter().flat_map(|&n| run_group(Family::C, n, SigmaConvention::Literal)).collect();
    assert!(bad.is_empty(), "{} failures, first: {:#?}", bad.len(), &bad[..bad.len().min(10)]);
}

#[test]
fn lemma_identities_d4() {
    let bad = run_group(Family::D, 4, SigmaConvention::CommutingPair);
    assert!(bad.is_empty(), "{} failures, first: {:#?}", bad.len(), &bad[..bad.len().min(10)]);
}

// The literal D permutation reverses s_{n-1} against s_n; only long blocks
// of rank >= 3 are affected.
#[test]
fn literal_d_permutation_misses_only_long_blocks() {
    let g = WeylGroup::new(Family::D, 4).unwrap();
    let spec = AlgebraSpec::trivial_torus(g, 0.5).unwrap();
    let mut failing = 0;
    for (w, _) in g.enumerate() {
        let nf = g.normal_form(&w).unwrap();
        let act = WordAction::new(&spec, &nf.word()).unwrap();
        let cert = hitting_polynomials_with(&act, &nf, 11, SigmaConvention::Literal).unwrap();
        let long = nf.parts().iter().skip(2).any(|p| p.word.len() >= p.r);
        assert_eq!(cert.passed(), !long, "{nf}");
        failing += usize::from(!cert.passed());
    }
    assert_eq!(failing, 112);
}
