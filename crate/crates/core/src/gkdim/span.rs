//! Dimensions of `xi^k F`, the span of all words of length at most `k` in
//! the generator entries applied to the cyclic vector.
//!
//! Every path shifts multi-indices by a fixed displacement, so any integer
//! functional that takes the same value on the displacements of all paths of
//! each entry grades the module. Basis vectors of different grade are
//! orthogonal, and Gram-Schmidt runs independently inside each grade block.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;
use num_integer::Integer;
use rayon::prelude::*;

use crate::corep::WordAction;
use crate::error::{Error, Result};
use crate::fock::{MultiIndex, OperatorSum, SparseVector};
use crate::scalar::Real;

/// Integer functionals on multi-indices that every generator entry shifts by
/// a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    functionals: Vec<Vec<i64>>,
}

impl Grading {
    /// Grading compatible with every path of every operator in `ops`.
    pub fn for_operators<T: Real>(factors: usize, ops: &[&OperatorSum<T>]) -> Self {
        let mut rows: Vec<Vec<i128>> = Vec::new();
        for op in ops {
            let paths = op.paths();
            if let Some(first) = paths.first() {
                let base = first.displacement();
                for p in &paths[1..] {
                    let d = p.displacement();
                    let row: Vec<i128> = d.iter().zip(&base).map(|(a, b)| (a - b) as i128).collect();
                    if row.iter().any(|&x| x != 0) {
                        rows.push(row);
                    }
                }
            }
        }
        Grading { functionals: integer_kernel(factors, rows) }
    }

    pub fn functionals(&self) -> &[Vec<i64>] {
        &self.functionals
    }

    pub fn grade(&self, index: &[u16]) -> Vec<i64> {
        self.functionals.iter().map(|f| f.iter().zip(index).map(|(a, &b)| a * b as i64).sum()).collect()
    }
}

/// Integer basis of `{x : row . x = 0 for all rows}`.
fn integer_kernel(cols: usize, mut rows: Vec<Vec<i128>>) -> Vec<Vec<i64>> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i == r || rows[i][c] == 0 {
                continue;
            }
            let (a, b) = (rows[r][c], rows[i][c]);
            let row_r = rows[r].clone();
            for (x, y) in rows[i].iter_mut().zip(&row_r) {
                *x = *x * a - *y * b;
            }
            normalize(&mut rows[i]);
        }
        pivots.push((r, c));
        r += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let scale = pivots.iter().fold(1i128, |acc, &(row, c)| acc.lcm(&rows[row][c].abs()));
    let mut out = Vec::new();
    for f in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        let mut x = vec![0i128; cols];
        x[f] = scale;
        for &(row, c) in &pivots {
            x[c] = -rows[row][f] * scale / rows[row][c];
        }
        normalize(&mut x);
        out.push(x.into_iter().map(|v| v as i64).collect());
    }
    out
}

fn normalize(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |acc, x| acc.gcd(x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// Generator entries `(k, l)` used for span closure: all nonzero entries,
/// or only those in the given rows.
pub fn generator_entries<T: Real>(action: &WordAction<T>, rows: Option<&[usize]>) -> Vec<(usize, usize)> {
    let dim = action.dim();
    let mut out = Vec::new();
    for k in 1..=dim {
        if rows.is_some_and(|r| !r.contains(&k)) {
            continue;
        }
        for l in 1..=dim {
            if !action.entry(k, l).expect("in range").is_zero() {
                out.push((k, l));
            }
        }
    }
    out
}

/// Result of a span closure run.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanClosure {
    /// `dims[k] = dim xi^k F`.
    pub dims: Vec<usize>,
    /// Smallest relative residual that was accepted as a new direction.
    pub min_accepted: f64,
    /// Largest relative residual that was rejected as dependent.
    pub max_rejected: f64,
}

struct Block<T: Real> {
    coords: HashMap<MultiIndex, usize>,
    support: Vec<MultiIndex>,
    basis: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Block<T> {
    fn new() -> Self {
        Block { coords: HashMap::new(), support: Vec::new(), basis: Vec::new() }
    }

    fn densify(&mut self, v: &SparseVector<T>) -> Vec<Complex<T>> {
        for (idx, _) in v.iter() {
            if !self.coords.contains_key(idx) {
                self.coords.insert(idx.clone(), self.support.len());
                self.support.push(idx.clone());
            }
        }
        let mut d = vec![Complex::new(T::zero(), T::zero()); self.support.len()];
        for (idx, c) in v.iter() {
            d[self.coords[idx]] = *c;
        }
        d
    }

    fn project_out(&self, r: &mut [Complex<T>]) {
        for b in &self.basis {
            let mut c = Complex::new(T::zero(), T::zero());
            for (x, y) in b.iter().zip(r.iter()) {
                c = c + x.conj() * y;
            }
            for (x, y) in b.iter().zip(r.iter_mut()) {
                *y = *y - c * x;
            }
        }
    }
}

fn dense_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

struct BlockOutcome<T: Real> {
    added: Vec<SparseVector<T>>,
    min_accepted: f64,
    max_rejected: f64,
    ambiguous: Option<f64>,
}

fn project_one<T: Real>(b: &[Complex<T>], r: &mut [Complex<T>]) {
    let mut c = Complex::new(T::zero(), T::zero());
    for (x, y) in b.iter().zip(r.iter()) {
        c = c + x.conj() * y;
    }
    for (x, y) in b.iter().zip(r.iter_mut()) {
        *y = *y - c * x;
    }
}

/// Orthonormalizes `cands` against the block, appending the new directions.
///
/// Candidates are taken largest relative residual first (Gram-Schmidt with
/// column pivoting), so every accepted direction is as well conditioned as
/// the data allows and rounding in the frontier stays near machine level.
fn absorb<T: Real>(block: &mut Block<T>, cands: &[(SparseVector<T>, T)], tol: f64) -> BlockOutcome<T> {
    let mut out = BlockOutcome { added: Vec::new(), min_accepted: f64::INFINITY, max_rejected: 0.0, ambiguous: None };
    let mut rs: Vec<Vec<Complex<T>>> = cands.iter().map(|(v, _)| block.densify(v)).collect();
    let len = block.support.len();
    let zero = Complex::new(T::zero(), T::zero());
    let n0: Vec<T> = cands.iter().map(|(_, m)| *m).collect();
    // older basis vectors are shorter; missing coordinates are zero
    rs.par_iter_mut().for_each(|r| {
        r.resize(len, zero);
        block.project_out(r);
        block.project_out(r);
    });
    let mut alive: Vec<usize> = (0..rs.len()).filter(|&i| n0[i] > T::zero()).collect();
    let first_new = block.basis.len();
    while !alive.is_empty() {
        let rel = |i: usize| (dense_norm(&rs[i]) / n0[i]).to_f64().unwrap_or(f64::NAN);
        // deterministic argmax: first index wins ties
        let (pos, best) = alive.iter().enumerate().map(|(p, &i)| (p, rel(i))).fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best < tol / 10.0 {
            out.max_rejected = out.max_rejected.max(best);
            break;
        }
        if best <= tol * 10.0 {
            out.ambiguous = Some(best);
            return out;
        }
        let i = alive.remove(pos);
        let mut r = std::mem::take(&mut rs[i]);
        for b in &block.basis[first_new..] {
            project_one(b, &mut r);
        }
        let nr = dense_norm(&r);
        r.iter_mut().for_each(|x| *x = *x / nr);
        {
            let rref = &r;
            let mut targets: Vec<&mut Vec<Complex<T>>> = Vec::new();
            for (j, v) in rs.iter_mut().enumerate() {
                if alive.contains(&j) {
                    targets.push(v);
                }
            }
            targets.par_iter_mut().for_each(|v| project_one(rref, v));
        }
        // the frontier keeps the image itself, not its residual, so rounding
        // in a weakly independent direction does not feed the next level
        out.added.push(cands[i].0.clone());
        block.basis.push(r);
        out.min_accepted = out.min_accepted.min(best);
    }
    out
}

/// Runs `V_0 = span{cyclic}`, `V_{k+1} = V_k + xi V_k` for `k < kmax`.
///
/// A candidate joins the basis when its relative residual after
/// orthogonalization exceeds `tol`; residuals within a factor 10 of `tol`
/// abort with [`Error::RankAmbiguity`]. Coordinates reaching `cutoff` abort
/// with [`Error::TruncationContact`].
pub fn span_closure<T: Real>(
    action: &WordAction<T>,
    gens: &[(usize, usize)],
    kmax: usize,
    cutoff: usize,
    tol: f64,
) -> Result<SpanClosure> {
    let factors = action.factors();
    let q = action.spec().q();
    let ops: Vec<&OperatorSum<T>> = gens.iter().map(|&(k, l)| action.entry(k, l)).collect::<Result<_>>()?;
    let grading = Grading::for_operators(factors, &ops);

    let cyclic = SparseVector::cyclic(factors, cutoff);
    let mut blocks: BTreeMap<Vec<i64>, Block<T>> = BTreeMap::new();
    let mut start = Block::new();
    let d = start.densify(&cyclic);
    start.basis.push(d);
    blocks.insert(grading.grade(&vec![0; factors]), start);

    let mut dims = vec![1usize];
    let mut frontier = vec![cyclic];
    let (mut min_accepted, mut max_rejected) = (f64::INFINITY, 0.0f64);
    for _ in 0..kmax {
        let images: Vec<Vec<(SparseVector<T>, T)>> = frontier
            .par_iter()
            .map(|b| {
                ops.iter()
                    .map(|op| op.apply(q, b).map(|v| (v, op.magnitude(q, b))))
                    .filter(|r| !matches!(r, Ok((v, _)) if v.is_empty()))
                    .collect()
            })
            .collect::<Vec<Result<Vec<_>>>>()
            .into_iter()
            .collect::<Result<_>>()?;

        let mut by_grade: BTreeMap<Vec<i64>, Vec<(SparseVector<T>, T)>> = BTreeMap::new();
        for (v, m) in images.into_iter().flatten() {
            let (idx, _) = v.iter().next().expect("nonempty");
            by_grade.entry(grading.grade(idx)).or_default().push((v, m));
        }
        for g in by_grade.keys() {
            blocks.entry(g.clone()).or_insert_with(|| Block::new());
        }
        let mut work: Vec<(&Vec<i64>, &mut Block<T>, &Vec<(SparseVector<T>, T)>)> = blocks
            .iter_mut()
            .filter_map(|(g, b)| by_grade.get(g).map(|c| (g, b, c)))
            .collect();
        let outcomes: Vec<BlockOutcome<T>> =
            work.par_iter_mut().map(|(_, b, c)| absorb(b, c, tol)).collect();

        frontier = Vec::new();
        for o in outcomes {
            if let Some(residual) = o.ambiguous {
                return Err(Error::RankAmbiguity { residual, tol });
            }
            min_accepted = min_accepted.min(o.min_accepted);
            max_rejected = max_rejected.max(o.max_rejected);
            frontier.extend(o.added);
        }
        dims.push(dims.last().copied().unwrap_or(0) + frontier.len());
    }
    Ok(SpanClosure { dims, min_accepted, max_rejected })
}
