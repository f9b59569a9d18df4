//! Lower-bound certificates: polynomials in generator entries whose ordered
//! powers move the cyclic vector onto any prescribed basis vector.
//!
//! Each block of the normal form gets one polynomial per factor. Block `i`
//! polynomials are built from the operators `T_j^i`, so they act on the
//! block's own factors and leave the earlier ones alone.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lemmas::{block, block_ranks, check_matches, part_entries};
use crate::corep::{corep_dim, WordAction};
use crate::error::{Error, Result};
use crate::fock::SparseVector;
use crate::scalar::Real;
use crate::weyl::{Family, NormalForm, WeylGroup};

/// Largest exponent on the test grid.
pub const MAX_EXPONENT: u16 = 3;
/// Upper limit on the number of exponent tuples checked.
pub const MAX_TUPLES: usize = 500;
/// Smallest accepted modulus of a hitting coefficient.
pub const MIN_COEFFICIENT: f64 = 1e-6;

/// A generator entry `u^row_col` or the commutator of two of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HittingPolynomial {
    Entry { row: usize, col: usize },
    Commutator { a: (usize, usize), b: (usize, usize) },
}

impl HittingPolynomial {
    pub fn degree(&self) -> usize {
        match self {
            HittingPolynomial::Entry { .. } => 1,
            HittingPolynomial::Commutator { .. } => 2,
        }
    }

    /// Applies the polynomial to `v`; boundary contact is an error.
    pub fn apply<T: Real>(&self, action: &WordAction<T>, v: &SparseVector<T>) -> Result<SparseVector<T>> {
        let q = action.spec().q();
        let one = |(k, l): (usize, usize), v: &SparseVector<T>| -> Result<SparseVector<T>> {
            let (out, contact) = action.entry(k, l)?.apply_truncating(q, v)?;
            if contact {
                return Err(Error::TruncationContact { cutoff: v.cutoff() });
            }
            Ok(out)
        };
        match *self {
            HittingPolynomial::Entry { row, col } => one((row, col), v),
            HittingPolynomial::Commutator { a, b } => {
                let mut ab = one(a, &one(b, v)?)?;
                ab.axpy(-num_complex::Complex::new(T::one(), T::zero()), &one(b, &one(a, v)?)?)?;
                Ok(ab)
            }
        }
    }
}

impl HittingPolynomial {
    /// Entrywise modulus bound `|p| v` (for a commutator `|a||b| + |b||a|`).
    pub fn apply_modulus<T: Real>(&self, action: &WordAction<T>, v: &SparseVector<T>) -> Result<SparseVector<T>> {
        let q = action.spec().q();
        let one = |(k, l): (usize, usize), v: &SparseVector<T>| -> Result<SparseVector<T>> { Ok(action.entry(k, l)?.apply_modulus(q, v)) };
        match *self {
            HittingPolynomial::Entry { row, col } => one((row, col), v),
            HittingPolynomial::Commutator { a, b } => {
                let mut ab = one(a, &one(b, v)?)?;
                ab.axpy(num_complex::Complex::new(T::one(), T::zero()), &one(b, &one(a, v)?)?)?;
                Ok(ab)
            }
        }
    }
}

impl fmt::Display for HittingPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HittingPolynomial::Entry { row, col } => write!(f, "u[{row},{col}]"),
            HittingPolynomial::Commutator { a, b } => write!(f, "[u[{},{}],u[{},{}]]", a.0, a.1, b.0, b.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Local {
    Col(usize),
    Comm(usize, usize),
}

/// Which permutation accompanies the type D polynomials of a long block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaConvention {
    /// `sigma(j) = N_i - j - 1` on the whole reversal range.
    #[default]
    Literal,
    /// As `Literal`, but for ranks `i >= 3` the indices `j = i - 1` and
    /// `j = i` are fixed: the commuting letters `s_{n-1}`, `s_n` are not
    /// reversed against each other.
    CommutingPair,
}

/// Columns (in the rank-`i` window, row `N_i`) and permutation for a block
/// of length `len`. `sigma[j-1]` is the factor hit by the `j`-th polynomial.
fn block_rule(family: Family, i: usize, len: usize, conv: SigmaConvention) -> (Vec<Local>, Vec<usize>) {
    let n = match family {
        Family::A => i + 1,
        Family::C | Family::D => 2 * i,
    };
    let plain = || ((1..=len).map(|j| Local::Col(n + 1 - j)).collect(), (1..=len).collect());
    match family {
        Family::A => plain(),
        Family::C if len <= i => plain(),
        Family::C => {
            let polys = (1..=len)
                .map(|j| {
                    if j + len + 1 <= n {
                        Local::Col(n + 1 - j)
                    } else if j < i {
                        Local::Col(j + 1)
                    } else if j == i {
                        Local::Comm(i + 1, i)
                    } else {
                        Local::Col(j)
                    }
                })
                .collect();
            let sigma = (1..=len).map(|j| if j + len >= n && j <= len { n - j } else { j }).collect();
            (polys, sigma)
        }
        Family::D if len < i => plain(),
        Family::D => {
            let polys = (1..=len).map(|j| if j + len + 2 <= n { Local::Col(n + 1 - j) } else { Local::Col(j + 1) }).collect();
            let fixed = |j: usize| conv == SigmaConvention::CommutingPair && i >= 3 && (j + 1 == i || j == i);
            let sigma = (1..=len).map(|j| if j + len + 1 >= n && j <= len && !fixed(j) { n - j - 1 } else { j }).collect();
            (polys, sigma)
        }
    }
}

/// Polynomials of one block, expressed in global entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCertificate {
    pub rank: usize,
    /// First tensor factor of the block (0-based).
    pub factor_start: usize,
    pub polys: Vec<HittingPolynomial>,
    /// 1-based factor within the block hit by each polynomial.
    pub sigma: Vec<usize>,
}

impl BlockCertificate {
    pub fn sigma_is_permutation(&self) -> bool {
        let mut seen = vec![false; self.sigma.len()];
        self.sigma.iter().all(|&s| s >= 1 && s <= seen.len() && !std::mem::replace(&mut seen[s - 1], true))
    }
}

/// Polynomials for every block of a normal form.
pub fn certificate_blocks(nf: &NormalForm, conv: SigmaConvention) -> Result<Vec<BlockCertificate>> {
    let group: WeylGroup = nf.group();
    let mut out = Vec::new();
    for i in block_ranks(&group) {
        let (range, _) = block(nf, i)?;
        let entries = part_entries(nf, i)?;
        debug_assert_eq!(entries.len(), corep_dim(&WeylGroup::new(group.family(), i)?));
        let (locals, sigma) = block_rule(group.family(), i, range.len(), conv);
        let polys = locals
            .into_iter()
            .map(|p| match p {
                Local::Col(c) => HittingPolynomial::Entry { row: entries[c - 1].0, col: entries[c - 1].1 },
                Local::Comm(a, b) => HittingPolynomial::Commutator { a: entries[a - 1], b: entries[b - 1] },
            })
            .collect();
        out.push(BlockCertificate { rank: i, factor_start: range.start, polys, sigma });
    }
    Ok(out)
}

/// Verified hitting identities of a module.
///
/// A tuple passes when the image is supported on exactly the target index
/// and its coefficient is nonzero: at least `MIN_COEFFICIENT` times the
/// cancellation-free magnitude of the same computation at the target. The smallest
/// absolute coefficient is reported separately; it decays like a power of
/// `q` in the exponents and carries no information about cancellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub sigma_convention: SigmaConvention,
    pub blocks: Vec<BlockCertificate>,
    /// Largest polynomial degree.
    #[serde(rename = "M0")]
    pub m0: usize,
    pub checks_passed: usize,
    pub checks_failed: usize,
    /// Smallest `|c|` over tuples that landed on their target.
    pub min_coefficient: f64,
    /// Smallest `|c| / magnitude` over tuples that landed on their target.
    pub min_relative_coefficient: f64,
    /// First few failures, for reporting.
    pub failures: Vec<String>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.checks_failed == 0
    }
}

/// Exponent tuples on `{0..=MAX_EXPONENT}^len`: the full grid when it has at
/// most `MAX_TUPLES` points, otherwise the zero tuple and seeded samples.
pub fn exponent_tuples(len: usize, seed: u64) -> Vec<Vec<u16>> {
    let base = MAX_EXPONENT as usize + 1;
    let full = (0..len).try_fold(1usize, |acc, _| acc.checked_mul(base).filter(|&x| x <= MAX_TUPLES));
    match full {
        Some(count) => (0..count)
            .map(|mut c| {
                (0..len)
                    .map(|_| {
                        let d = (c % base) as u16;
                        c /= base;
                        d
                    })
                    .collect()
            })
            .collect(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = vec![vec![0; len]];
            while out.len() < MAX_TUPLES {
                out.push((0..len).map(|_| rng.gen_range(0..=MAX_EXPONENT)).collect());
            }
            out
        }
    }
}

enum Outcome {
    Landed { coefficient: f64, relative: f64 },
    Missed(String),
}

fn hit<T: Real>(action: &WordAction<T>, blocks: &[BlockCertificate], r: &[u16], cutoff: usize) -> Result<Outcome> {
    let mut v = SparseVector::cyclic(action.factors(), cutoff);
    let mut m = v.clone();
    for b in blocks {
        for (p, &s) in b.polys.iter().zip(&b.sigma).rev() {
            for _ in 0..r[b.factor_start + s - 1] {
                v = p.apply(action, &v)?;
                m = p.apply_modulus(action, &m)?;
            }
        }
    }
    Ok(match v.single_point() {
        Some((idx, c)) if idx.as_slice() == r => {
            let coefficient = c.norm().to_f64().unwrap_or(0.0);
            let scale = m.get(r).norm().to_f64().unwrap_or(f64::NAN);
            Outcome::Landed { coefficient, relative: coefficient / scale }
        }
        Some((idx, _)) => Outcome::Missed(format!("exponents {r:?}: landed on {idx:?}")),
        None => Outcome::Missed(format!("exponents {r:?}: support has {} points", v.len())),
    })
}

/// Builds the certificate of `action` (whose word must be the normal form
/// `nf`) and checks the hitting identity on the exponent grid.
pub fn hitting_polynomials<T: Real>(action: &WordAction<T>, nf: &NormalForm, seed: u64) -> Result<Certificate> {
    hitting_polynomials_with(action, nf, seed, SigmaConvention::Literal)
}

pub fn hitting_polynomials_with<T: Real>(
    action: &WordAction<T>,
    nf: &NormalForm,
    seed: u64,
    conv: SigmaConvention,
) -> Result<Certificate> {
    check_matches(action, nf)?;
    let blocks = certificate_blocks(nf, conv)?;
    let m0 = blocks.iter().flat_map(|b| &b.polys).map(|p| p.degree()).max().unwrap_or(1);
    let mut failures: Vec<String> = blocks
        .iter()
        .filter(|b| !b.sigma_is_permutation())
        .map(|b| format!("rank {} permutation {:?} is not a bijection", b.rank, b.sigma))
        .collect();
    let mut failed = failures.len();
    let structural = failed;
    let cutoff = MAX_EXPONENT as usize + 2 * m0 + 2;
    let tuples = exponent_tuples(action.factors(), seed);
    let results = tuples.par_iter().map(|r| hit(action, &blocks, r, cutoff)).collect::<Result<Vec<_>>>()?;
    let (mut min_coefficient, mut min_relative_coefficient) = (f64::INFINITY, f64::INFINITY);
    for (r, res) in tuples.iter().zip(results) {
        let miss = match res {
            Outcome::Landed { coefficient, relative } => {
                min_coefficient = min_coefficient.min(coefficient);
                min_relative_coefficient = min_relative_coefficient.min(relative);
                (!(relative > MIN_COEFFICIENT)).then(|| format!("exponents {r:?}: coefficient {coefficient:e}, relative {relative:e}"))
            }
            Outcome::Missed(e) => Some(e),
        };
        if let Some(e) = miss {
            failed += 1;
            if failures.len() < 10 {
                failures.push(e);
            }
        }
    }
    Ok(Certificate {
        sigma_convention: conv,
        blocks,
        m0,
        checks_passed: structural + tuples.len() - failed,
        checks_failed: failed,
        min_coefficient,
        min_relative_coefficient,
        failures,
    })
}
