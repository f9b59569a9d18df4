//! Finitely supported vectors on truncated tensor powers of the shift space
//! `c00(N)`, and the weighted shift / diagonal operators that act on them.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coordinates of a basis vector `e_{i1} (x) ... (x) e_{ik}`.
pub type MultiIndex = Vec<u16>;

/// Single-factor endomorphisms of `c00(N)`. `N` is the number operator
/// `e_p -> p e_p`, `S` the backward shift `e_p -> e_{p-1}`.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementaryOp {
    Identity,
    /// `S* sqrt(1 - q^{2N+2})`
    Raise,
    /// `sqrt(1 - q^{2N+2}) S`
    Lower,
    /// `S* sqrt(1 - q^{4N+4})`, the long-root raise of type C
    RaiseLong,
    /// `sqrt(1 - q^{4N+4}) S`
    LowerLong,
    /// `q^N`
    DiagQN,
    /// `-q^{N+1}`
    DiagNegQN1,
    /// `-q^N`
    DiagNegQN,
    /// `q^{N+1}`
    DiagQN1,
    /// `-q^{2N+2}`
    DiagNegQ2N2,
    /// `q^{2N}`
    DiagQ2N,
}

impl ElementaryOp {
    /// Image of `e_p`: `None` when the operator annihilates it.
    pub fn apply<T: Real>(self, q: T, p: usize) -> Option<(usize, T)> {
        use ElementaryOp::*;
        let one = T::one();
        let pw = |e: usize| q.powi(e as i32);
        match self {
            Identity => Some((p, one)),
            Raise => Some((p + 1, (one - pw(2 * p + 2)).sqrt())),
            Lower => (p > 0).then(|| (p - 1, (one - pw(2 * p)).sqrt())),
            RaiseLong => Some((p + 1, (one - pw(4 * p + 4)).sqrt())),
            LowerLong => (p > 0).then(|| (p - 1, (one - pw(4 * p)).sqrt())),
            DiagQN => Some((p, pw(p))),
            DiagNegQN1 => Some((p, -pw(p + 1))),
            DiagNegQN => Some((p, -pw(p))),
            DiagQN1 => Some((p, pw(p + 1))),
            DiagNegQ2N2 => Some((p, -pw(2 * p + 2))),
            DiagQ2N => Some((p, pw(2 * p))),
        }
    }

    /// Change of the coordinate: -1, 0 or +1.
    pub fn shift(self) -> i32 {
        use ElementaryOp::*;
        match self {
            Raise | RaiseLong => 1,
            Lower | LowerLong => -1,
            _ => 0,
        }
    }

    pub fn is_diagonal(self) -> bool {
        self.shift() == 0
    }

    /// Hilbert-space adjoint; all coefficients are real.
    pub fn adjoint(self) -> Self {
        use ElementaryOp::*;
        match self {
            Raise => Lower,
            Lower => Raise,
            RaiseLong => LowerLong,
            LowerLong => RaiseLong,
            d => d,
        }
    }

    pub fn symbol(self) -> &'static str {
        use ElementaryOp::*;
        match self {
            Identity => "I",
            Raise => "S*sqrt(1-q^(2N+2))",
            Lower => "sqrt(1-q^(2N+2))S",
            RaiseLong => "S*sqrt(1-q^(4N+4))",
            LowerLong => "sqrt(1-q^(4N+4))S",
            DiagQN => "q^N",
            DiagNegQN1 => "-q^(N+1)",
            DiagNegQN => "-q^N",
            DiagQN1 => "q^(N+1)",
            DiagNegQ2N2 => "-q^(2N+2)",
            DiagQ2N => "q^(2N)",
        }
    }
}

impl fmt::Display for ElementaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Sparse vector in `c00(N)^{(x) factors}`, restricted to coordinates below
/// `cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T: Real> {
    factors: usize,
    cutoff: usize,
    terms: BTreeMap<MultiIndex, Complex<T>>,
}

impl<T: Real> SparseVector<T> {
    pub fn zero(factors: usize, cutoff: usize) -> Self {
        SparseVector { factors, cutoff, terms: BTreeMap::new() }
    }

    pub fn basis(index: MultiIndex, cutoff: usize) -> Result<Self> {
        if index.iter().any(|&c| c as usize >= cutoff) {
            return Err(Error::TruncationContact { cutoff });
        }
        let mut v = Self::zero(index.len(), cutoff);
        v.terms.insert(index, Complex::new(T::one(), T::zero()));
        Ok(v)
    }

    /// `e_0 (x) ... (x) e_0`.
    pub fn cyclic(factors: usize, cutoff: usize) -> Self {
        Self::basis(vec![0; factors], cutoff.max(1)).expect("zero index is inside any cutoff")
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex<T>)> {
        self.terms.iter()
    }

    pub fn get(&self, index: &[u16]) -> Complex<T> {
        self.terms.get(index).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Adds `c e_index`. A merge whose result is below `drop_threshold`
    /// relative to the merged magnitudes is treated as exact cancellation.
    pub fn add_term(&mut self, index: MultiIndex, c: Complex<T>) {
        use std::collections::btree_map::Entry;
        let zero = T::zero();
        match self.terms.entry(index) {
            Entry::Vacant(e) => {
                if c.re != zero || c.im != zero {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let old = *e.get();
                let s = old + c;
                if s.norm() <= T::drop_threshold() * old.norm().max(c.norm()) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.factors != other.factors {
            return Err(Error::ShapeMismatch { expected: self.factors, got: other.factors });
        }
        Ok(())
    }

    /// `self + c * other`.
    pub fn axpy(&mut self, c: Complex<T>, other: &Self) -> Result<()> {
        self.check_shape(other)?;
        for (k, v) in &other.terms {
            self.add_term(k.clone(), *v * c);
        }
        Ok(())
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        let mut out = Self::zero(self.factors, self.cutoff);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), *v * c);
        }
        out
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex::new(T::zero(), T::zero());
        for (k, a) in &small.terms {
            if let Some(b) = large.terms.get(k) {
                acc = acc + if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        acc
    }

    pub fn norm(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, v| acc + v.norm_sqr()).sqrt()
    }

    /// The unique index and coefficient if exactly one term is stored.
    pub fn single_point(&self) -> Option<(&MultiIndex, Complex<T>)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(k, v)| (k, *v))
        } else {
            None
        }
    }

    pub fn max_coordinate(&self) -> usize {
        self.terms.keys().flat_map(|k| k.iter().map(|&c| c as usize)).max().unwrap_or(0)
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Result<Self> {
        if self.max_coordinate() >= cutoff && !self.is_empty() {
            return Err(Error::TruncationContact { cutoff });
        }
        self.cutoff = cutoff;
        Ok(self)
    }
}

/// Tensor product of elementary operators with a complex prefactor: one
/// path through a concatenated diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOperator<T: Real> {
    pub scalar: Complex<T>,
    pub legs: Vec<ElementaryOp>,
}

impl<T: Real> PathOperator<T> {
    pub fn new(scalar: Complex<T>, legs: Vec<ElementaryOp>) -> Self {
        PathOperator { scalar, legs }
    }

    pub fn identity(factors: usize) -> Self {
        PathOperator { scalar: Complex::new(T::one(), T::zero()), legs: vec![ElementaryOp::Identity; factors] }
    }

    /// Image of a single basis vector: `None` if annihilated.
    pub fn apply_index(&self, q: T, index: &[u16]) -> Option<(MultiIndex, Complex<T>)> {
        let mut out = Vec::with_capacity(index.len());
        let mut c = self.scalar;
        for (op, &p) in self.legs.iter().zip(index) {
            let (np, w) = op.apply(q, p as usize)?;
            out.push(np as u16);
            c = c * w;
        }
        Some((out, c))
    }

    pub fn apply(&self, q: T, v: &SparseVector<T>) -> Result<SparseVector<T>> {
        let (out, contact) = self.apply_truncating(q, v)?;
        if contact {
            return Err(Error::TruncationContact { cutoff: v.cutoff });
        }
        Ok(out)
    }

    /// Applies the path, dropping images outside the cutoff and reporting
    /// whether that happened.
    pub fn apply_truncating(&self, q: T, v: &SparseVector<T>) -> Result<(SparseVector<T>, bool)> {
        if self.legs.len() != v.factors {
            return Err(Error::ShapeMismatch { expected: self.legs.len(), got: v.factors });
        }
        let mut out = SparseVector::zero(v.factors, v.cutoff);
        let mut contact = false;
        for (k, a) in &v.terms {
            if let Some((idx, c)) = self.apply_index(q, k) {
                if idx.iter().any(|&x| x as usize >= v.cutoff) {
                    contact = true;
                    continue;
                }
                out.add_term(idx, c * a);
            }
        }
        Ok((out, contact))
    }

    pub fn adjoint(&self) -> Self {
        PathOperator { scalar: self.scalar.conj(), legs: self.legs.iter().map(|op| op.adjoint()).collect() }
    }

    /// Total coordinate displacement of the path.
    pub fn displacement(&self) -> Vec<i32> {
        self.legs.iter().map(|op| op.shift()).collect()
    }
}

impl<T: Real> fmt::Display for PathOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let legs: Vec<&str> = self.legs.iter().map(|op| op.symbol()).collect();
        write!(f, "({:.6}{:+.6}i) ", self.scalar.re, self.scalar.im)?;
        if legs.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&legs.join(" (x) "))
        }
    }
}

/// Finite sum of paths; the empty sum is the zero operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum<T: Real> {
    factors: usize,
    paths: Vec<PathOperator<T>>,
}

impl<T: Real> OperatorSum<T> {
    pub fn zero(factors: usize) -> Self {
        OperatorSum { factors, paths: Vec::new() }
    }

    pub fn from_paths(factors: usize, paths: Vec<PathOperator<T>>) -> Result<Self> {
        if let Some(p) = paths.iter().find(|p| p.legs.len() != factors) {
            return Err(Error::ShapeMismatch { expected: factors, got: p.legs.len() });
        }
        Ok(OperatorSum { factors, paths })
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn paths(&self) -> &[PathOperator<T>] {
        &self.paths
    }

    pub fn is_zero(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn push(&mut self, path: PathOperator<T>) -> Result<()> {
        if path.legs.len() != self.factors {
            return Err(Error::ShapeMismatch { expected: self.factors, got: path.legs.len() });
        }
        self.paths.push(path);
        Ok(())
    }

    /// Adds the image of `c e_index` into `out`; returns true on boundary
    /// contact (the offending term is dropped).
    pub fn apply_index_into(&self, q: T, index: &[u16], c: Complex<T>, out: &mut SparseVector<T>) -> bool {
        let mut contact = false;
        for p in &self.paths {
            if let Some((idx, w)) = p.apply_index(q, index) {
                if idx.iter().any(|&x| x as usize >= out.cutoff) {
                    contact = true;
                    continue;
                }
                out.add_term(idx, w * c);
            }
        }
        contact
    }

    pub fn apply(&self, q: T, v: &SparseVector<T>) -> Result<SparseVector<T>> {
        let (out, contact) = self.apply_truncating(q, v)?;
        if contact {
            return Err(Error::TruncationContact { cutoff: v.cutoff });
        }
        Ok(out)
    }

    pub fn apply_truncating(&self, q: T, v: &SparseVector<T>) -> Result<(SparseVector<T>, bool)> {
        if self.factors != v.factors {
            return Err(Error::ShapeMismatch { expected: self.factors, got: v.factors });
        }
        let mut out = SparseVector::zero(v.factors, v.cutoff);
        let mut contact = false;
        for (k, a) in &v.terms {
            contact |= self.apply_index_into(q, k, *a, &mut out);
        }
        Ok((out, contact))
    }

    /// `|A| |v|`: the image computed with every coefficient replaced by its
    /// modulus. Terms beyond the cutoff are dropped.
    pub fn apply_modulus(&self, q: T, v: &SparseVector<T>) -> SparseVector<T> {
        let mut acc: BTreeMap<MultiIndex, T> = BTreeMap::new();
        for (k, a) in &v.terms {
            for p in &self.paths {
                if let Some((idx, w)) = p.apply_index(q, k) {
                    if idx.iter().all(|&x| (x as usize) < v.cutoff) {
                        let e = acc.entry(idx).or_insert_with(T::zero);
                        *e = *e + w.norm() * a.norm();
                    }
                }
            }
        }
        let terms = acc.into_iter().map(|(k, x)| (k, Complex::new(x, T::zero()))).collect();
        SparseVector { factors: v.factors, cutoff: v.cutoff, terms }
    }

    /// Norm of `|A| |v|`: the scale of `A v` before any cancellation between
    /// paths or terms.
    pub fn magnitude(&self, q: T, v: &SparseVector<T>) -> T {
        self.apply_modulus(q, v).norm()
    }

    pub fn adjoint(&self) -> Self {
        OperatorSum { factors: self.factors, paths: self.paths.iter().map(PathOperator::adjoint).collect() }
    }
}

/// Every multi-index with `factors` coordinates below `cutoff`, in
/// lexicographic order.
pub fn truncated_basis(factors: usize, cutoff: usize) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for _ in 0..factors {
        out = out
            .into_iter()
            .flat_map(|prefix: MultiIndex| {
                (0..cutoff as u16).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Compression of an operator to the truncated basis.
#[derive(Debug, Clone)]
pub struct DenseMatrix<T: Real> {
    pub basis: Vec<MultiIndex>,
    /// Row-major, `data[row][col]`.
    pub data: Vec<Vec<Complex<T>>>,
    /// True if some column had an image outside the truncation.
    pub boundary_contact: bool,
}

impl<T: Real> DenseMatrix<T> {
    pub fn of(op: &OperatorSum<T>, q: T, cutoff: usize) -> Self {
        let basis = truncated_basis(op.factors, cutoff);
        let pos: BTreeMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let d = basis.len();
        let zero = Complex::new(T::zero(), T::zero());
        let mut data = vec![vec![zero; d]; d];
        let mut contact = false;
        for (col, b) in basis.iter().enumerate() {
            let mut img = SparseVector::zero(op.factors, cutoff);
            contact |= op.apply_index_into(q, b, Complex::new(T::one(), T::zero()), &mut img);
            for (k, v) in img.iter() {
                data[pos[k]][col] = *v;
            }
        }
        DenseMatrix { basis, data, boundary_contact: contact }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim();
        let zero = Complex::new(T::zero(), T::zero());
        let mut data = vec![vec![zero; d]; d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i][k];
                if a == zero {
                    continue;
                }
                for j in 0..d {
                    data[i][j] = data[i][j] + a * other.data[k][j];
                }
            }
        }
        DenseMatrix { basis: self.basis.clone(), data, boundary_contact: self.boundary_contact || other.boundary_contact }
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let data = (0..d).map(|i| (0..d).map(|j| self.data[j][i].conj()).collect()).collect();
        DenseMatrix { basis: self.basis.clone(), data, boundary_contact: self.boundary_contact }
    }

    /// Entrywise maximum deviation from `other` (same basis assumed).
    pub fn max_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for (ra, rb) in self.data.iter().zip(&other.data) {
            for (a, b) in ra.iter().zip(rb) {
                m = m.max((*a - *b).norm());
            }
        }
        m
    }
}
