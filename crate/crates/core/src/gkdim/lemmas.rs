//! Unique-path vertex maps and part operators.
//!
//! For a module built from a normal form `w = w_1 ... w_n`, every left
//! vertex `k` of a tail `w_{i+1} ... w_l` has exactly one right vertex
//! `r(k)` whose entry fixes the cyclic vector up to a nonzero scalar. The
//! entries of the full module starting at the top row of the rank-`i`
//! window, with right vertex pushed through `r`, act on the factors of part
//! `i` like the rank-`i` module of `w_i` alone.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::corep::{corep_dim, elementary_action, ActionMatrix, AlgebraSpec, WordAction};
use crate::error::{Error, Result};
use crate::fock::{truncated_basis, OperatorSum, SparseVector};
use crate::scalar::Real;
use crate::weyl::{Family, NormalForm, Part, WeylGroup};

/// Modulus below which an image counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), passed: true, detail: String::new() }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed: false, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "ok" } else { "FAILED" };
        if self.detail.is_empty() {
            write!(f, "{tag} {}", self.name)
        } else {
            write!(f, "{tag} {}: {}", self.name, self.detail)
        }
    }
}

/// Window `[M_n^i, N_n^i]` of global vertices seen by the rank-`i` part.
pub fn window(group: &WeylGroup, i: usize) -> (usize, usize) {
    let n = group.rank();
    match group.family() {
        Family::A => (1, i + 1),
        Family::C | Family::D => (n + 1 - i, n + i),
    }
}

/// Global vertex of the local rank-`i` vertex `x`.
pub fn to_global(group: &WeylGroup, i: usize, x: usize) -> usize {
    match group.family() {
        Family::A => x,
        Family::C | Family::D => x + group.rank() - i,
    }
}

/// Map between vertex windows, stored on its domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMap {
    pub domain_start: usize,
    pub images: Vec<usize>,
}

impl VertexMap {
    pub fn identity(domain: (usize, usize)) -> Self {
        VertexMap { domain_start: domain.0, images: (domain.0..=domain.1).collect() }
    }

    pub fn domain(&self) -> std::ops::RangeInclusive<usize> {
        self.domain_start..=self.domain_start + self.images.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<usize> {
        k.checked_sub(self.domain_start).and_then(|o| self.images.get(o)).copied()
    }

    /// `other o self`; vertices leaving `other`'s domain map to `None`.
    pub fn then(&self, other: &VertexMap) -> Option<VertexMap> {
        let images = self.images.iter().map(|&v| other.get(v)).collect::<Option<Vec<_>>>()?;
        Some(VertexMap { domain_start: self.domain_start, images })
    }
}

fn occurrences(word: &[usize], s: usize) -> usize {
    word.iter().filter(|&&x| x == s).count()
}

/// Case rule for the vertex map of a single part `w_r`, on the window of
/// rank `r - 1`.
pub fn r_map(group: &WeylGroup, part: &Part) -> Result<VertexMap> {
    let n = group.rank();
    let r = part.r;
    if r == 0 || r > n || part.word.iter().any(|&s| s == 0 || s > n) {
        return Err(Error::InvalidNormalForm(format!("malformed part {part:?}")));
    }
    let once = |s: usize| s >= 1 && s <= n && occurrences(&part.word, s) == 1;
    let dom = window(group, r - 1);
    let mut images = Vec::new();
    for j in dom.0..=dom.1 {
        let img = match group.family() {
            Family::A => {
                if once(j) {
                    j + 1
                } else {
                    j
                }
            }
            Family::D if j == n || j == n + 1 => {
                let (a, b) = (once(n - 1), once(n));
                match (a, b, j == n) {
                    (true, true, true) => n + 1,
                    (true, true, false) => n,
                    (true, false, true) => n - 1,
                    (true, false, false) => n + 2,
                    (false, true, true) => n + 2,
                    (false, true, false) => n - 1,
                    (false, false, _) => j,
                }
            }
            Family::C | Family::D => {
                if j <= n {
                    if j >= 2 && once(j - 1) {
                        j - 1
                    } else {
                        j
                    }
                } else if j < 2 * n && once(2 * n - j) {
                    j + 1
                } else {
                    j
                }
            }
        };
        images.push(img);
    }
    Ok(VertexMap { domain_start: dom.0, images })
}

/// Composite vertex map of parts `i+1 ..= l` of a normal form, on the
/// window of rank `i`.
pub fn tail_map(group: &WeylGroup, nf: &NormalForm, i: usize, l: usize) -> Result<VertexMap> {
    let mut m = VertexMap::identity(window(group, i));
    for part in &nf.parts()[i..l] {
        let step = r_map(group, part)?;
        m = m.then(&step).ok_or_else(|| Error::InvalidNormalForm(format!("vertex map leaves the window at part {}", part.r)))?;
    }
    Ok(m)
}

/// Independent vertex map: follow, through each letter of `word`, the only
/// edge that keeps `e_0` fixed up to a scalar (the crossing edge on rows the
/// letter touches, the identity otherwise).
pub fn traced_r_map(group: &WeylGroup, word: &[usize]) -> Result<Vec<usize>> {
    let dim = corep_dim(group);
    let mut out = Vec::with_capacity(dim);
    for start in 1..=dim {
        let mut v = start;
        for &s in word {
            let diag = elementary_action(group, s, v, v)?;
            if diag != Some(crate::fock::ElementaryOp::Identity) {
                let mut next = None;
                for l in 1..=dim {
                    if l != v && elementary_action(group, s, v, l)?.is_some() {
                        next = Some(l);
                    }
                }
                v = next.ok_or_else(|| Error::InvalidNormalForm(format!("row {v} of s{s} has no crossing edge")))?;
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Checks that entry `(k, r(k))` sends the cyclic vector to a nonzero
/// multiple of itself and every `(j, r(k))`, `j != k` in the domain, kills
/// it.
pub fn verify_unique_path<T: Real>(action: &WordAction<T>, map: &VertexMap, label: &str) -> Result<Vec<Check>> {
    let q = action.spec().q();
    let cyc = SparseVector::cyclic(action.factors(), 2);
    let mut checks = Vec::new();
    for k in map.domain() {
        let rk = map.get(k).expect("in domain");
        let name = format!("{label} unique path {k}->{rk}");
        let img = action.entry(k, rk)?.apply_truncating(q, &cyc)?.0;
        match img.single_point() {
            Some((idx, c)) if idx.iter().all(|&x| x == 0) && c.norm().to_f64().unwrap_or(0.0) > ZERO_TOL => {
                checks.push(Check::pass(name))
            }
            _ => checks.push(Check::fail(name, format!("image has {} terms, norm {:e}", img.len(), img.norm().to_f64().unwrap_or(f64::NAN)))),
        }
        for j in map.domain().filter(|&j| j != k) {
            let name = format!("{label} cross entry {j}->{rk}");
            let img = action.entry(j, rk)?.apply_truncating(q, &cyc)?.0;
            let norm = img.norm().to_f64().unwrap_or(f64::NAN);
            if norm < ZERO_TOL {
                checks.push(Check::pass(name));
            } else {
                checks.push(Check::fail(name, format!("norm {norm:e}")));
            }
        }
    }
    Ok(checks)
}

/// Factor offsets of the parts: part `i` occupies `offsets[i-1]..offsets[i]`.
pub fn part_offsets(nf: &NormalForm) -> Vec<usize> {
    let mut out = vec![0];
    for p in nf.parts() {
        out.push(out.last().unwrap() + p.word.len());
    }
    out
}

pub(crate) fn check_matches<T: Real>(action: &WordAction<T>, nf: &NormalForm) -> Result<()> {
    if action.word() != nf.word().as_slice() || action.spec().group() != nf.group() {
        return Err(Error::InvalidNormalForm(format!("action word {:?} is not the normal form {nf}", action.word())));
    }
    Ok(())
}

/// Entry indices `(N_n^i, r(g(j)))` for `j = 1..=N_i`, with `g` the
/// embedding of the rank-`i` window and `r` the vertex map of the parts
/// after `i`.
pub fn part_entries(nf: &NormalForm, i: usize) -> Result<Vec<(usize, usize)>> {
    let group = nf.group();
    let n = group.rank();
    if i == 0 || i > n {
        return Err(Error::GeneratorOutOfRange { index: i, rank: n });
    }
    let tail = tail_map(&group, nf, i, n)?;
    let (lo, hi) = window(&group, i);
    Ok((1..=hi - lo + 1).map(|j| (hi, tail.get(to_global(&group, i, j)).expect("window"))).collect())
}

/// The operators `T_j^i` of the full module, `j = 1..=N_i`.
pub fn part_operators<T: Real>(action: &WordAction<T>, nf: &NormalForm, i: usize) -> Result<Vec<OperatorSum<T>>> {
    check_matches(action, nf)?;
    part_entries(nf, i)?.into_iter().map(|(k, l)| action.entry(k, l).cloned()).collect()
}

/// Letters of a part renumbered for the rank-`i` group.
pub fn localize_word(group: &WeylGroup, i: usize, word: &[usize]) -> Vec<usize> {
    match group.family() {
        Family::A => word.to_vec(),
        Family::C | Family::D => word.iter().map(|&s| s + i - group.rank()).collect(),
    }
}

/// Ranks that carry their own block of hitting polynomials. Type D has no
/// rank-1 algebra, so its first two parts form one rank-2 block.
pub fn block_ranks(group: &WeylGroup) -> std::ops::RangeInclusive<usize> {
    match group.family() {
        Family::D => 2..=group.rank(),
        Family::A | Family::C => 1..=group.rank(),
    }
}

/// Factor range and word of the rank-`i` block of a normal form.
pub fn block(nf: &NormalForm, i: usize) -> Result<(std::ops::Range<usize>, Vec<usize>)> {
    let group = nf.group();
    if !block_ranks(&group).contains(&i) {
        return Err(Error::GeneratorOutOfRange { index: i, rank: group.rank() });
    }
    let offs = part_offsets(nf);
    let first = if group.family() == Family::D && i == 2 { 0 } else { i - 1 };
    let word = nf.parts()[first..i].iter().flat_map(|p| p.word.iter().copied()).collect();
    Ok((offs[first]..offs[i], word))
}

/// Rank-`i` action of a block word, built from the rank-`i` generator tables.
pub fn reference_action<T: Real>(group: &WeylGroup, i: usize, word: &[usize], q: T) -> Result<ActionMatrix<T>> {
    let small = WeylGroup::new(group.family(), i)?;
    let spec = AlgebraSpec::trivial_torus(small, q)?;
    let mut m = ActionMatrix::unit(corep_dim(&small));
    for s in localize_word(group, i, word) {
        m = m.convolve(&ActionMatrix::letter(&spec, s)?)?;
    }
    Ok(m)
}

/// Checks `T_j^i (v1 (x) v2 (x) e0...) = C v1 (x) pi_{w_i}(u^{N_i}_j) v2 (x) e0...`
/// on basis vectors with coordinates below `probe`. The constant `C` may
/// depend on `j` but not on the probe.
pub fn verify_part_operators<T: Real>(action: &WordAction<T>, nf: &NormalForm, i: usize, probe: usize) -> Result<Vec<Check>> {
    let group = nf.group();
    let q = action.spec().q();
    let ops = part_operators(action, nf, i)?;
    let (range, word) = block(nf, i)?;
    let reference = reference_action(&group, i, &word, q)?;
    let (a, b) = (range.start, range.end);
    let factors = action.factors();
    let cutoff = probe + (b - a) + 2;
    let ni = reference.dim();

    let mut checks = Vec::new();
    for (j, t) in ops.iter().enumerate() {
        let mut constant: Option<Complex<T>> = None;
        let name = format!("part {i} operator T_{}", j + 1);
        let rop = reference.entry(ni, j + 1)?;
        let mut worst = 0.0f64;
        let mut failure = None;
        for prefix in truncated_basis(a, probe) {
            for mid in truncated_basis(b - a, probe) {
                let mut idx = prefix.clone();
                idx.extend_from_slice(&mid);
                idx.resize(factors, 0);
                let v = SparseVector::basis(idx, cutoff)?;
                let (lhs, c1) = t.apply_truncating(q, &v)?;
                let (rmid, c2) = rop.apply_truncating(q, &SparseVector::basis(mid.clone(), cutoff)?)?;
                if c1 || c2 {
                    return Err(Error::TruncationContact { cutoff });
                }
                let mut rhs = SparseVector::zero(factors, cutoff);
                for (m, c) in rmid.iter() {
                    let mut full = prefix.clone();
                    full.extend_from_slice(m);
                    full.resize(factors, 0);
                    rhs.add_term(full, *c);
                }
                let scale = lhs.norm().max(rhs.norm());
                if scale.to_f64().unwrap_or(0.0) < ZERO_TOL {
                    continue;
                }
                if constant.is_none() && rhs.norm().to_f64().unwrap_or(0.0) > ZERO_TOL {
                    let (m, c) = rhs.iter().next().map(|(m, c)| (m.clone(), *c)).expect("nonzero");
                    constant = Some(lhs.get(&m) / c);
                }
                let Some(cst) = constant else {
                    failure = Some(format!("image of {mid:?} is nonzero where the rank-{i} entry vanishes"));
                    break;
                };
                let mut diff = lhs.clone();
                diff.axpy(-cst, &rhs)?;
                let rel = (diff.norm() / scale).to_f64().unwrap_or(f64::NAN);
                worst = worst.max(rel);
                if !(rel < 1e-10) {
                    failure = Some(format!("probe {prefix:?}|{mid:?}: relative deviation {rel:e}"));
                    break;
                }
            }
            if failure.is_some() {
                break;
            }
        }
        if let Some(c) = constant {
            if c.norm().to_f64().unwrap_or(0.0) < ZERO_TOL {
                failure.get_or_insert_with(|| "constant vanishes".into());
            }
        }
        checks.push(match failure {
            None => Check { name, passed: true, detail: format!("max relative deviation {worst:.1e}") },
            Some(d) => Check::fail(name, d),
        });
    }
    Ok(checks)
}
