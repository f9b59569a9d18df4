//! Exact oracle for the growth dimensions.
//!
//! In the basis `f_m = prod_{j<=m} sqrt(1 - q^{2j}) e_m` (with `q^{4j}` in
//! long-root factors) every leg has coefficients in `Z[q]`: raises map
//! `f_m` to `f_{m+1}` and lowers carry `1 - q^{2m}`. Ranks are computed
//! exactly modulo a large prime with `q` a residue, no truncation needed.

use std::collections::{BTreeMap, HashMap};

use qfa_gk::corep::{AlgebraSpec, WordAction};
use qfa_gk::fock::{ElementaryOp, OperatorSum};
use qfa_gk::gkdim::span::{generator_entries, span_closure};
use qfa_gk::gkdim::quotient_rows;
use qfa_gk::weyl::{Family, WeylGroup};

const P: u64 = (1 << 61) - 1;

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}
fn add(a: u64, b: u64) -> u64 {
    (a + b) % P
}
fn neg(a: u64) -> u64 {
    (P - a) % P
}
fn pow(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    r
}
fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

fn leg(op: ElementaryOp, q: u64, m: u16) -> Option<(u16, u64)> {
    use ElementaryOp::*;
    let qp = |e: u64| pow(q, e);
    let m64 = m as u64;
    Some(match op {
        Identity => (m, 1),
        Raise | RaiseLong => (m + 1, 1),
        Lower => (m.checked_sub(1)?, add(1, neg(qp(2 * m64)))),
        LowerLong => (m.checked_sub(1)?, add(1, neg(qp(4 * m64)))),
        DiagQN => (m, qp(m64)),
        DiagNegQN1 => (m, neg(qp(m64 + 1))),
        DiagNegQN => (m, neg(qp(m64))),
        DiagQN1 => (m, qp(m64 + 1)),
        DiagNegQ2N2 => (m, neg(qp(2 * m64 + 2))),
        DiagQ2N => (m, qp(2 * m64)),
    })
}

type Vector = BTreeMap<Vec<u16>, u64>;

fn apply(op: &OperatorSum<f64>, q: u64, v: &Vector) -> Vector {
    let mut out = Vector::new();
    for path in op.paths() {
        // trivial torus: path scalars are signs
        let s = path.scalar.re.round() as i64;
        assert!(s.abs() == 1 && path.scalar.im == 0.0);
        let s = if s > 0 { 1 } else { P - 1 };
        'basis: for (idx, &c) in v {
            let mut img = Vec::with_capacity(idx.len());
            let mut w = mul(s, c);
            for (&op, &m) in path.legs.iter().zip(idx) {
                let Some((nm, x)) = leg(op, q, m) else { continue 'basis };
                img.push(nm);
                w = mul(w, x);
            }
            let e = out.entry(img).or_insert(0);
            *e = add(*e, w);
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

#[derive(Default)]
struct Echelon {
    rows: HashMap<Vec<u16>, Vector>,
}

impl Echelon {
    /// Reduces `v`; adds it when independent.
    fn insert(&mut self, mut v: Vector) -> bool {
        while let Some((lead, &c)) = v.iter().next_back() {
            let Some(row) = self.rows.get(lead) else {
                let lead = lead.clone();
                let s = inv(c);
                v.values_mut().for_each(|x| *x = mul(*x, s));
                self.rows.insert(lead, v);
                return true;
            };
            for (k, &x) in row {
                let e = v.entry(k.clone()).or_insert(0);
                *e = add(*e, neg(mul(c, x)));
            }
            v.retain(|_, x| *x != 0);
        }
        false
    }
}

fn exact_dims(act: &WordAction<f64>, gens: &[(usize, usize)], q: u64, kmax: usize) -> Vec<usize> {
    let ops: Vec<&OperatorSum<f64>> = gens.iter().map(|&(k, l)| act.entry(k, l).unwrap()).collect();
    let mut ech = Echelon::default();
    let cyclic: Vector = [(vec![0; act.factors()], 1)].into();
    ech.insert(cyclic.clone());
    let mut frontier = vec![cyclic];
    let mut dims = vec![1];
    for _ in 0..kmax {
        let mut next = Vec::new();
        for v in &frontier {
            for op in &ops {
                let w = apply(op, q, v);
                if !w.is_empty() && ech.insert(w.clone()) {
                    next.push(w);
                }
            }
        }
        dims.push(dims.last().unwrap() + next.len());
        frontier = next;
    }
    dims
}

fn float_dims(g: WeylGroup, word: &[usize], rows: Option<&[usize]>, kmax: usize) -> (Vec<usize>, WordAction<f64>, Vec<(usize, usize)>) {
    let spec = AlgebraSpec::trivial_torus(g, 0.5).unwrap();
    let act = WordAction::new(&spec, word).unwrap();
    let gens = generator_entries(&act, rows);
    let dims = span_closure(&act, &gens, kmax, kmax + 4, 1e-8).unwrap().dims;
    (dims, act, gens)
}

fn check(f: Family, n: usize, word: &[usize], kmax: usize) {
    let g = WeylGroup::new(f, n).unwrap();
    let (dims, act, gens) = float_dims(g, word, None, kmax);
    let half = inv(2);
    assert_eq!(dims, exact_dims(&act, &gens, half, kmax), "{f}{n} {word:?}");
    // a second residue for q: the rank is generic in q
    assert_eq!(dims, exact_dims(&act, &gens, 1_234_567_891, kmax), "{f}{n} {word:?}");
}

#[test]
fn d4_turnaround_word() {
    check(Family::D, 4, &[4, 2, 1, 2, 4], 9);
}

#[test]
fn d4_two_path_word() {
    check(Family::D, 4, &[1, 2, 3, 4, 2], 8);
}

#[test]
fn a3_and_c2_longest() {
    check(Family::A, 3, &[1, 2, 1, 3, 2, 1], 8);
    check(Family::C, 2, &[1, 2, 1, 2], 10);
    check(Family::C, 3, &[3, 2, 3, 1, 2], 8);
}

#[test]
fn every_short_d4_element() {
    let g = WeylGroup::new(Family::D, 4).unwrap();
    for (w, len) in g.enumerate() {
        if len <= 4 {
            check(Family::D, 4, &g.normal_form(&w).unwrap().word(), 7);
        }
    }
}

#[test]
fn quotient_generators() {
    let g = WeylGroup::new(Family::A, 3).unwrap();
    let rows = quotient_rows(&g, 2).unwrap();
    let (dims, act, gens) = float_dims(g, &[3, 2, 1], Some(&rows), 10);
    assert_eq!(dims, exact_dims(&act, &gens, inv(2), 10));
}
