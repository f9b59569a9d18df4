//! Generator actions of the quantized function algebras on tensor powers of
//! the shift space, built by concatenating single-letter diagrams.
//!
//! Entry `(k, l)` of an action is the image of the matrix coefficient
//! `u^k_l`: the sum over all vertex paths that start at row `k` on the left
//! and end at `l` on the right. Indices are 1-based at the API boundary.

use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::fock::{DenseMatrix, ElementaryOp, MultiIndex, OperatorSum, PathOperator, SparseVector};
use crate::scalar::Real;
use crate::weyl::{Family, WeylGroup};

/// Tolerance for accepting a torus coordinate as unit modulus.
pub const TORUS_TOL: f64 = 1e-10;

/// Dimension `N_n` of the vector corepresentation.
pub fn corep_dim(group: &WeylGroup) -> usize {
    match group.family() {
        Family::A => group.rank() + 1,
        Family::C | Family::D => 2 * group.rank(),
    }
}

/// Family, rank, deformation parameter and torus point of a module.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraSpec<T: Real> {
    group: WeylGroup,
    q: T,
    t: Vec<Complex<T>>,
}

impl<T: Real> AlgebraSpec<T> {
    pub fn new(group: WeylGroup, q: T, t: Vec<Complex<T>>) -> Result<Self> {
        let qf = q.to_f64().unwrap_or(f64::NAN);
        if !(qf > 0.0 && qf < 1.0) {
            return Err(Error::InvalidQ(qf));
        }
        if t.len() != group.rank() {
            return Err(Error::TorusLength { expected: group.rank(), got: t.len() });
        }
        for (i, z) in t.iter().enumerate() {
            let m = z.norm().to_f64().unwrap_or(f64::NAN);
            if !((m - 1.0).abs() <= TORUS_TOL) {
                return Err(Error::NotUnitModulus { index: i + 1, modulus: m });
            }
        }
        Ok(AlgebraSpec { group, q, t })
    }

    /// Parameters with `t = (1, ..., 1)`.
    pub fn trivial_torus(group: WeylGroup, q: T) -> Result<Self> {
        Self::new(group, q, vec![Complex::new(T::one(), T::zero()); group.rank()])
    }

    pub fn group(&self) -> WeylGroup {
        self.group
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn torus(&self) -> &[Complex<T>] {
        &self.t
    }

    pub fn dim(&self) -> usize {
        corep_dim(&self.group)
    }
}

fn check_entry(group: &WeylGroup, k: usize, l: usize) -> Result<()> {
    let dim = corep_dim(group);
    if k == 0 || l == 0 || k > dim || l > dim {
        return Err(Error::EntryOutOfRange { k, l, dim });
    }
    Ok(())
}

/// Single-factor operator assigned to `u^k_l` by the letter `s_i`, or `None`
/// if the diagram has no arrow from `k` to `l`.
pub fn elementary_action(group: &WeylGroup, i: usize, k: usize, l: usize) -> Result<Option<ElementaryOp>> {
    use ElementaryOp::*;
    if i == 0 || i > group.rank() {
        return Err(Error::GeneratorOutOfRange { index: i, rank: group.rank() });
    }
    check_entry(group, k, l)?;
    let n = group.rank();
    let table: Vec<((usize, usize), ElementaryOp)> = match group.family() {
        Family::A => vec![((i, i), Lower), ((i + 1, i + 1), Raise), ((i, i + 1), DiagNegQN1), ((i + 1, i), DiagQN)],
        Family::C if i == n => {
            vec![((n, n), LowerLong), ((n + 1, n + 1), RaiseLong), ((n, n + 1), DiagNegQ2N2), ((n + 1, n), DiagQ2N)]
        }
        Family::D if i == n => vec![
            ((n - 1, n - 1), Lower),
            ((n, n), Lower),
            ((n + 1, n + 1), Raise),
            ((n + 2, n + 2), Raise),
            ((n - 1, n + 1), DiagNegQN1),
            ((n + 1, n - 1), DiagQN),
            ((n, n + 2), DiagQN1),
            ((n + 2, n), DiagNegQN),
        ],
        Family::C | Family::D => {
            let (a, b) = (2 * n - i, 2 * n - i + 1);
            vec![
                ((i, i), Lower),
                ((i + 1, i + 1), Raise),
                ((a, a), Lower),
                ((b, b), Raise),
                ((i, i + 1), DiagNegQN1),
                ((i + 1, i), DiagQN),
                ((a, b), DiagQN1),
                ((b, a), DiagNegQN),
            ]
        }
    };
    if let Some((_, op)) = table.iter().find(|(kl, _)| *kl == (k, l)) {
        return Ok(Some(*op));
    }
    // rows untouched by the letter carry the identity
    let touched = table.iter().any(|((a, _), _)| *a == k);
    Ok((k == l && !touched).then_some(Identity))
}

/// Diagonal torus scalar of row `k`, `None` off the diagonal.
pub fn torus_action<T: Real>(group: &WeylGroup, t: &[Complex<T>], k: usize, l: usize) -> Result<Option<Complex<T>>> {
    check_entry(group, k, l)?;
    let n = group.rank();
    if t.len() != n {
        return Err(Error::TorusLength { expected: n, got: t.len() });
    }
    if k != l {
        return Ok(None);
    }
    let z = match group.family() {
        Family::A if k == 1 => t.iter().fold(Complex::new(T::one(), T::zero()), |acc, z| acc * z.conj()),
        Family::A => t[n + 1 - k],
        Family::C | Family::D if k <= n => t[k - 1].conj(),
        Family::C | Family::D => t[2 * n - k],
    };
    Ok(Some(z))
}

/// Signature of a replaceable generator table; used to build actions from
/// modified tables in negative controls.
pub type LetterTable = dyn Fn(&WeylGroup, usize, usize, usize) -> Result<Option<ElementaryOp>> + Sync;

/// Square matrix of operator sums on a fixed number of tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionMatrix<T: Real> {
    dim: usize,
    factors: usize,
    entries: Vec<OperatorSum<T>>,
}

impl<T: Real> ActionMatrix<T> {
    /// The torus layer: zero factors, diagonal scalars.
    pub fn torus(spec: &AlgebraSpec<T>) -> Result<Self> {
        let dim = spec.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for k in 1..=dim {
            for l in 1..=dim {
                let mut s = OperatorSum::zero(0);
                if let Some(z) = torus_action(&spec.group, &spec.t, k, l)? {
                    s.push(PathOperator::new(z, Vec::new()))?;
                }
                entries.push(s);
            }
        }
        Ok(ActionMatrix { dim, factors: 0, entries })
    }

    /// The identity action on zero factors (unit of convolution).
    pub fn unit(dim: usize) -> Self {
        let entries = (0..dim * dim)
            .map(|idx| {
                let mut s = OperatorSum::zero(0);
                if idx / dim == idx % dim {
                    s.push(PathOperator::identity(0)).expect("shape 0");
                }
                s
            })
            .collect();
        ActionMatrix { dim, factors: 0, entries }
    }

    /// One-factor layer of the letter `s_i`.
    pub fn letter(spec: &AlgebraSpec<T>, i: usize) -> Result<Self> {
        Self::letter_from(spec, i, &elementary_action)
    }

    pub fn letter_from(spec: &AlgebraSpec<T>, i: usize, table: &LetterTable) -> Result<Self> {
        let dim = spec.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for k in 1..=dim {
            for l in 1..=dim {
                let mut s = OperatorSum::zero(1);
                if let Some(op) = table(&spec.group, i, k, l)? {
                    s.push(PathOperator::new(Complex::new(T::one(), T::zero()), vec![op]))?;
                }
                entries.push(s);
            }
        }
        Ok(ActionMatrix { dim, factors: 1, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn entry(&self, k: usize, l: usize) -> Result<&OperatorSum<T>> {
        if k == 0 || l == 0 || k > self.dim || l > self.dim {
            return Err(Error::EntryOutOfRange { k, l, dim: self.dim });
        }
        Ok(&self.entries[(k - 1) * self.dim + (l - 1)])
    }

    /// Sub-block of rows and columns `lo..=hi`, renumbered from 1.
    pub fn restrict(&self, lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || hi > self.dim || lo > hi {
            return Err(Error::EntryOutOfRange { k: lo, l: hi, dim: self.dim });
        }
        let dim = hi - lo + 1;
        let mut entries = Vec::with_capacity(dim * dim);
        for k in lo..=hi {
            for l in lo..=hi {
                entries.push(self.entry(k, l)?.clone());
            }
        }
        Ok(ActionMatrix { dim, factors: self.factors, entries })
    }

    /// `(self * other)(u^k_l) = sum_j self(u^k_j) (x) other(u^j_l)`: legs are
    /// concatenated, scalars multiplied, zero prefactors pruned.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch { expected: self.dim, got: other.dim });
        }
        let dim = self.dim;
        let factors = self.factors + other.factors;
        let zero = T::zero();
        let mut entries = Vec::with_capacity(dim * dim);
        for k in 0..dim {
            for l in 0..dim {
                let mut s = OperatorSum::zero(factors);
                for j in 0..dim {
                    let left = &self.entries[k * dim + j];
                    let right = &other.entries[j * dim + l];
                    for a in left.paths() {
                        for b in right.paths() {
                            let scalar = a.scalar * b.scalar;
                            if scalar.re == zero && scalar.im == zero {
                                continue;
                            }
                            let mut legs = a.legs.clone();
                            legs.extend_from_slice(&b.legs);
                            s.push(PathOperator::new(scalar, legs))?;
                        }
                    }
                }
                entries.push(s);
            }
        }
        Ok(ActionMatrix { dim, factors, entries })
    }
}

/// The action `tau_t * pi_{s_i1} * ... * pi_{s_il}` of a reduced word.
#[derive(Debug, Clone)]
pub struct WordAction<T: Real> {
    spec: AlgebraSpec<T>,
    word: Vec<usize>,
    matrix: ActionMatrix<T>,
}

impl<T: Real> WordAction<T> {
    pub fn new(spec: &AlgebraSpec<T>, word: &[usize]) -> Result<Self> {
        Self::with_table(spec, word, &elementary_action)
    }

    /// Builds from a custom letter table. The word must still be reduced.
    pub fn with_table(spec: &AlgebraSpec<T>, word: &[usize], table: &LetterTable) -> Result<Self> {
        if !spec.group.is_reduced(word)? {
            return Err(Error::NotReduced(word.to_vec()));
        }
        let mut matrix = ActionMatrix::torus(spec)?;
        for &i in word {
            matrix = matrix.convolve(&ActionMatrix::letter_from(spec, i, table)?)?;
        }
        Ok(WordAction { spec: spec.clone(), word: word.to_vec(), matrix })
    }

    /// Same action assembled as `tau * (s_i1 * (s_i2 * (...)))`.
    pub fn new_right_folded(spec: &AlgebraSpec<T>, word: &[usize]) -> Result<Self> {
        Self::new_right_folded_with(spec, word, &elementary_action)
    }

    pub fn new_right_folded_with(spec: &AlgebraSpec<T>, word: &[usize], table: &LetterTable) -> Result<Self> {
        if !spec.group.is_reduced(word)? {
            return Err(Error::NotReduced(word.to_vec()));
        }
        let mut tail = ActionMatrix::unit(spec.dim());
        for &i in word.iter().rev() {
            tail = ActionMatrix::letter_from(spec, i, table)?.convolve(&tail)?;
        }
        let matrix = ActionMatrix::torus(spec)?.convolve(&tail)?;
        Ok(WordAction { spec: spec.clone(), word: word.to_vec(), matrix })
    }

    pub fn spec(&self) -> &AlgebraSpec<T> {
        &self.spec
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn factors(&self) -> usize {
        self.matrix.factors
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn matrix(&self) -> &ActionMatrix<T> {
        &self.matrix
    }

    pub fn entry(&self, k: usize, l: usize) -> Result<&OperatorSum<T>> {
        self.matrix.entry(k, l)
    }
}

fn apply_all<T: Real>(op: &OperatorSum<T>, q: T, v: &SparseVector<T>) -> Result<SparseVector<T>> {
    let (out, contact) = op.apply_truncating(q, v)?;
    if contact {
        return Err(Error::TruncationContact { cutoff: v.cutoff() });
    }
    Ok(out)
}

/// Largest deviation from `sum_j u^j_k* u^j_l = delta_kl` and
/// `sum_j u^k_j u^l_j* = delta_kl` on the given basis vectors. Probes need
/// two units of headroom below `cutoff` in every coordinate.
pub fn unitarity_defect<T: Real>(action: &WordAction<T>, probes: &[MultiIndex], cutoff: usize) -> Result<f64> {
    let q = action.spec.q;
    let n = action.dim();
    let mut worst = 0.0f64;
    for p in probes {
        let e = SparseVector::basis(p.clone(), cutoff)?;
        for k in 1..=n {
            for l in 1..=n {
                let mut left = SparseVector::zero(action.factors(), cutoff);
                let mut right = SparseVector::zero(action.factors(), cutoff);
                for j in 1..=n {
                    let x = apply_all(action.entry(j, l)?, q, &e)?;
                    left.axpy(Complex::new(T::one(), T::zero()), &apply_all(&action.entry(j, k)?.adjoint(), q, &x)?)?;
                    let y = apply_all(&action.entry(l, j)?.adjoint(), q, &e)?;
                    right.axpy(Complex::new(T::one(), T::zero()), &apply_all(action.entry(k, j)?, q, &y)?)?;
                }
                if k == l {
                    left.axpy(-Complex::new(T::one(), T::zero()), &e)?;
                    right.axpy(-Complex::new(T::one(), T::zero()), &e)?;
                }
                worst = worst.max(left.norm().to_f64().unwrap_or(f64::NAN)).max(right.norm().to_f64().unwrap_or(f64::NAN));
            }
        }
    }
    Ok(worst)
}

/// Largest difference between the entries of two actions on the given
/// basis vectors.
pub fn action_difference<T: Real>(a: &WordAction<T>, b: &WordAction<T>, probes: &[MultiIndex], cutoff: usize) -> Result<f64> {
    if a.dim() != b.dim() || a.factors() != b.factors() {
        return Err(Error::ShapeMismatch { expected: a.factors(), got: b.factors() });
    }
    let q = a.spec.q;
    let mut worst = 0.0f64;
    for p in probes {
        let e = SparseVector::basis(p.clone(), cutoff)?;
        for k in 1..=a.dim() {
            for l in 1..=a.dim() {
                let mut d = apply_all(a.entry(k, l)?, q, &e)?;
                d.axpy(-Complex::new(T::one(), T::zero()), &apply_all(b.entry(k, l)?, q, &e)?)?;
                worst = worst.max(d.norm().to_f64().unwrap_or(f64::NAN));
            }
        }
    }
    Ok(worst)
}

/// Dense compression of entry `(k, l)` to the basis with coordinates below
/// `cutoff`. Boundary contact is reported through the matrix flag.
pub fn action_matrix_dense<T: Real>(action: &WordAction<T>, k: usize, l: usize, cutoff: usize) -> Result<DenseMatrix<T>> {
    Ok(DenseMatrix::of(action.entry(k, l)?, action.spec.q, cutoff))
}

/// Parses a comma-separated list of complex numbers such as
/// `"0.6+0.8i, 1, -i"`.
pub fn parse_torus(s: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    let mut col = 1;
    for tok in s.split(',') {
        let z = parse_complex(tok.trim()).ok_or_else(|| Error::Parse {
            column: col,
            message: format!("cannot read {:?} as a complex number", tok.trim()),
        })?;
        out.push(z);
        col += tok.len() + 1;
    }
    Ok(out)
}

fn parse_complex(s: &str) -> Option<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let coef = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        t => t.parse::<f64>().ok(),
    };
    match split {
        Some(p) => Some(Complex64::new(body[..p].parse().ok()?, coef(&body[p..])?)),
        None => Some(Complex64::new(0.0, coef(body)?)),
    }
}
