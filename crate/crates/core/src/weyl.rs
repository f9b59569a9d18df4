//! Weyl groups of types A_n, C_n and D_n realized as signed permutation
//! matrices.
//!
//! Generators are 1-indexed following the usual Dynkin numbering: for C_n
//! the long root is `n`, for D_n the fork is at `n - 2` with leaves `n - 1`
//! and `n`. Words multiply left to right, `[i1, i2, ...] = s_i1 s_i2 ...`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    C,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => Err(Error::Parse {
                column: 1,
                message: format!("unknown family {other:?}, expected A, C or D"),
            }),
        }
    }
}

/// A Weyl group `W(X_n)` for `X` in {A, C, D}.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylGroup {
    family: Family,
    rank: usize,
}

/// Group element stored as the signed image of each row: row `i` of the
/// matrix has its single nonzero entry `sign(image[i])` in column
/// `|image[i]| - 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    group: WeylGroup,
    image: Vec<i32>,
}

impl WeylGroup {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A | Family::C => rank >= 1,
            Family::D => rank >= 2,
        };
        if !ok {
            return Err(Error::InvalidRank { family, rank });
        }
        Ok(WeylGroup { family, rank })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Size of the realizing matrices: `n + 1` for A_n, `n` otherwise.
    pub fn matrix_dim(&self) -> usize {
        match self.family {
            Family::A => self.rank + 1,
            Family::C | Family::D => self.rank,
        }
    }

    pub fn order(&self) -> u64 {
        let n = self.rank as u64;
        let fact: u64 = (1..=n).product();
        match self.family {
            Family::A => fact * (n + 1),
            Family::C => fact << n,
            Family::D => fact << (n - 1),
        }
    }

    pub fn identity(&self) -> SignedPermutation {
        SignedPermutation {
            group: *self,
            image: (1..=self.matrix_dim() as i32).collect(),
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.rank {
            return Err(Error::GeneratorOutOfRange { index: i, rank: self.rank });
        }
        Ok(())
    }

    pub fn simple_reflection(&self, i: usize) -> Result<SignedPermutation> {
        self.check_index(i)?;
        let mut w = self.identity();
        let n = self.rank;
        match (self.family, i == n) {
            (Family::C, true) => w.image[n - 1] = -(n as i32),
            // reflection in e_{n-1} + e_n
            (Family::D, true) => {
                w.image[n - 2] = -(n as i32);
                w.image[n - 1] = -(n as i32 - 1);
            }
            _ => w.image.swap(i - 1, i),
        }
        Ok(w)
    }

    pub fn word_to_element(&self, word: &[usize]) -> Result<SignedPermutation> {
        let mut w = self.identity();
        for &i in word {
            w = w.multiply(&self.simple_reflection(i)?)?;
        }
        Ok(w)
    }

    pub fn is_reduced(&self, word: &[usize]) -> Result<bool> {
        Ok(self.word_to_element(word)?.length() == word.len())
    }

    /// Every element with its length, by breadth-first search over the
    /// Cayley graph of the simple reflections.
    pub fn enumerate(&self) -> Vec<(SignedPermutation, usize)> {
        let gens: Vec<_> = (1..=self.rank)
            .map(|i| self.simple_reflection(i).expect("index in range"))
            .collect();
        let mut seen: HashMap<SignedPermutation, usize> = HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        let e = self.identity();
        seen.insert(e.clone(), 0);
        queue.push_back(e);
        while let Some(x) = queue.pop_front() {
            let d = seen[&x];
            order.push((x.clone(), d));
            for g in &gens {
                let y = x.mul_unchecked(g);
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), d + 1);
                    queue.push_back(y);
                }
            }
        }
        order
    }

    /// Generators of the parabolic subgroup `W_r` that carries the first
    /// `r` normal-form parts.
    fn chain_generators(&self, r: usize) -> Vec<usize> {
        let n = self.rank;
        match self.family {
            Family::A => (1..=r).collect(),
            Family::C | Family::D => (n + 1 - r..=n).collect(),
        }
    }

    /// The admissible `r`-th parts: `(k, eps, word)`, each word being the
    /// unique reduced word of a minimal representative of
    /// `W_{r-1} \ W_r`. The empty part is not listed.
    pub fn part_table(&self, r: usize) -> Vec<Part> {
        assert!(r >= 1 && r <= self.rank, "part index out of range");
        let n = self.rank;
        let lo = n + 1 - r;
        let mut raw: Vec<(usize, u8, Vec<usize>)> = Vec::new();
        match self.family {
            Family::A => {
                for k in lo..=n {
                    raw.push((k, 1, (n + 1 - k..=r).rev().collect()));
                }
            }
            Family::C => {
                for k in lo..=n {
                    raw.push((k, 1, (lo..=k).collect()));
                }
                for k in lo..n {
                    let mut w: Vec<usize> = (lo..=n).collect();
                    w.extend((k..n).rev());
                    raw.push((k, 2, w));
                }
            }
            Family::D => {
                for k in lo..=n {
                    raw.push((k, 1, (lo..=k).collect()));
                }
                for k in lo..n.saturating_sub(1) {
                    let mut w: Vec<usize> = (lo..=n).collect();
                    w.extend((k..=n - 2).rev());
                    raw.push((k, 2, w));
                }
                // ascending run that skips s_{n-1}
                let mut w: Vec<usize> = (lo..=n.saturating_sub(2)).collect();
                w.push(n);
                raw.push((n, 2, w));
            }
        }
        let below = self.chain_generators(r - 1);
        let mut out: Vec<Part> = Vec::new();
        let mut elems: Vec<SignedPermutation> = Vec::new();
        for (k, eps, word) in raw {
            let x = self.word_to_element(&word).expect("valid letters");
            if x.length() != word.len() {
                continue;
            }
            if below.iter().any(|&s| x.left_mul_gen(s).length() < x.length()) {
                continue;
            }
            // eps = 1 wins ties: it was pushed first
            if elems.contains(&x) {
                continue;
            }
            elems.push(x);
            out.push(Part { r, k, eps, word });
        }
        out
    }

    pub fn empty_part(&self, r: usize) -> Part {
        Part { r, k: self.rank, eps: 0, word: Vec::new() }
    }

    pub fn normal_form(&self, w: &SignedPermutation) -> Result<NormalForm> {
        if w.group != *self {
            return Err(Error::GroupMismatch);
        }
        let mut x = w.clone();
        let mut parts = vec![None; self.rank];
        for r in (1..=self.rank).rev() {
            let below = self.chain_generators(r - 1);
            let mut c = x.clone();
            'strip: loop {
                for &s in &below {
                    let y = c.left_mul_gen(s);
                    if y.length() < c.length() {
                        c = y;
                        continue 'strip;
                    }
                }
                break;
            }
            let part = if c.is_identity() {
                self.empty_part(r)
            } else {
                self.part_table(r)
                    .into_iter()
                    .find(|p| self.word_to_element(&p.word).map(|e| e == c).unwrap_or(false))
                    .ok_or_else(|| {
                        Error::InvalidNormalForm(format!("no part string matches coset rep at r = {r}"))
                    })?
            };
            x = x.multiply(&c.inverse())?;
            parts[r - 1] = Some(part);
        }
        debug_assert!(x.is_identity());
        Ok(NormalForm {
            group: *self,
            parts: parts.into_iter().map(|p| p.expect("all parts set")).collect(),
        })
    }

    /// Builds a normal form from `(r, k, eps)` triples, checking each one
    /// against the part table.
    pub fn normal_form_from_triples(&self, triples: &[(usize, usize, u8)]) -> Result<NormalForm> {
        if triples.len() != self.rank {
            return Err(Error::InvalidNormalForm(format!(
                "expected {} parts, got {}",
                self.rank,
                triples.len()
            )));
        }
        let mut parts = Vec::with_capacity(self.rank);
        for (idx, &(r, k, eps)) in triples.iter().enumerate() {
            if r != idx + 1 {
                return Err(Error::InvalidNormalForm(format!("part {} labelled r = {r}", idx + 1)));
            }
            if eps == 0 {
                parts.push(self.empty_part(r));
                continue;
            }
            let part = self
                .part_table(r)
                .into_iter()
                .find(|p| p.k == k && p.eps == eps)
                .ok_or_else(|| {
                    Error::InvalidNormalForm(format!("no part ({r},{k},{eps}) for {}{}", self.family, self.rank))
                })?;
            parts.push(part);
        }
        Ok(NormalForm { group: *self, parts })
    }

    pub fn is_min_coset_rep(&self, w: &SignedPermutation, s: &ParabolicSubset) -> Result<bool> {
        if w.group != *self {
            return Err(Error::GroupMismatch);
        }
        for &a in &s.roots {
            self.check_index(a)?;
        }
        let l = w.length();
        Ok(s.roots.iter().all(|&a| w.left_mul_gen(a).length() > l))
    }
}

impl SignedPermutation {
    pub fn group(&self) -> WeylGroup {
        self.group
    }

    /// Signed 1-based column of the nonzero entry of each row.
    pub fn image(&self) -> &[i32] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| v == i as i32 + 1)
    }

    pub fn multiply(&self, other: &SignedPermutation) -> Result<SignedPermutation> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &SignedPermutation) -> SignedPermutation {
        // (AB)_{i,.}: row i of A picks row |a| of B, scaled by sign(a)
        let image = self
            .image
            .iter()
            .map(|&a| a.signum() * other.image[a.unsigned_abs() as usize - 1])
            .collect();
        SignedPermutation { group: self.group, image }
    }

    fn left_mul_gen(&self, i: usize) -> SignedPermutation {
        self.group
            .simple_reflection(i)
            .expect("generator index checked by caller")
            .mul_unchecked(self)
    }

    pub fn inverse(&self) -> SignedPermutation {
        let mut image = vec![0; self.image.len()];
        for (i, &a) in self.image.iter().enumerate() {
            image[a.unsigned_abs() as usize - 1] = a.signum() * (i as i32 + 1);
        }
        SignedPermutation { group: self.group, image }
    }

    /// Dense matrix, row major.
    pub fn matrix(&self) -> Vec<Vec<i32>> {
        let d = self.image.len();
        self.image
            .iter()
            .map(|&a| {
                let mut row = vec![0; d];
                row[a.unsigned_abs() as usize - 1] = a.signum();
                row
            })
            .collect()
    }

    pub fn negative_count(&self) -> usize {
        self.image.iter().filter(|&&a| a < 0).count()
    }

    /// Coxeter length from the closed forms.
    ///
    /// The special generator of C_n/D_n acts on the last coordinate, so the
    /// window is read in reversed coordinates before applying the
    /// hyperoctahedral formulas `inv(u) + sum_{u(i)<0} |u(i)|` (type C) and
    /// `inv(u) + sum_{u(i)<0} (|u(i)| - 1)` (type D).
    pub fn length(&self) -> usize {
        let d = self.image.len() as i32;
        let u: Vec<i32> = match self.group.family {
            Family::A => self.image.clone(),
            Family::C | Family::D => self
                .image
                .iter()
                .rev()
                .map(|&a| a.signum() * (d + 1 - a.abs()))
                .collect(),
        };
        let mut inv = 0usize;
        for i in 0..u.len() {
            for j in i + 1..u.len() {
                if u[i] > u[j] {
                    inv += 1;
                }
            }
        }
        let neg: usize = match self.group.family {
            Family::A => 0,
            Family::C => u.iter().filter(|&&a| a < 0).map(|a| a.unsigned_abs() as usize).sum(),
            Family::D => u.iter().filter(|&&a| a < 0).map(|a| a.unsigned_abs() as usize - 1).sum(),
        };
        inv + neg
    }
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{:?}", self.group.family, self.group.rank, self.image)
    }
}

/// One normal-form part `psi_{r,k}^{(eps)}` together with its word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub r: usize,
    pub k: usize,
    pub eps: u8,
    pub word: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    group: WeylGroup,
    parts: Vec<Part>,
}

impl NormalForm {
    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn group(&self) -> WeylGroup {
        self.group
    }

    /// Concatenation of the part words; reduced.
    pub fn word(&self) -> Vec<usize> {
        self.parts.iter().flat_map(|p| p.word.iter().copied()).collect()
    }

    pub fn reconstruct(&self) -> SignedPermutation {
        self.group.word_to_element(&self.word()).expect("part letters are in range")
    }

    pub fn triples(&self) -> Vec<(usize, usize, u8)> {
        self.parts.iter().map(|p| (p.r, p.k, p.eps)).collect()
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| format!("{},{},{}", p.r, p.k, p.eps)).collect();
        f.write_str(&s.join(";"))
    }
}

/// Set of simple roots generating a parabolic subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicSubset {
    roots: Vec<usize>,
}

impl ParabolicSubset {
    pub fn new(mut roots: Vec<usize>) -> Self {
        roots.sort_unstable();
        roots.dedup();
        ParabolicSubset { roots }
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// `S_1 = {}`; for `m >= 2`, `{1..m-1}` in type A and `{n-m+2..n}` in
    /// type C. Not defined for type D.
    pub fn standard(group: &WeylGroup, m: usize) -> Result<Self> {
        let n = group.rank();
        if m == 0 || m > n {
            return Err(Error::InvalidParabolic(format!("m = {m} outside 1..={n}")));
        }
        let roots = match group.family() {
            Family::A => (1..m).collect(),
            Family::C => (n + 2 - m..=n).collect(),
            Family::D => {
                return Err(Error::InvalidParabolic("S_m is only defined for types A and C".into()))
            }
        };
        Ok(ParabolicSubset { roots })
    }
}

/// Parses whitespace-separated generator indices, e.g. `"1 2 3 4 2"`.
pub fn parse_word(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut col = 1;
    for tok in s.split(|c: char| c.is_whitespace() || c == ',') {
        if !tok.is_empty() {
            let v = tok.parse::<usize>().map_err(|_| Error::Parse {
                column: col,
                message: format!("expected a generator index, found {tok:?}"),
            })?;
            out.push(v);
        }
        col += tok.len() + 1;
    }
    Ok(out)
}

pub fn format_word(word: &[usize]) -> String {
    word.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

/// Parses `"r,k,eps;r,k,eps;..."`.
pub fn parse_normal_form(s: &str) -> Result<Vec<(usize, usize, u8)>> {
    let mut out = Vec::new();
    let mut col = 1;
    for chunk in s.split(';') {
        let fields: Vec<&str> = chunk.split(',').map(str::trim).collect();
        if chunk.trim().is_empty() {
            col += chunk.len() + 1;
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Parse { column: col, message: format!("expected r,k,eps in {chunk:?}") });
        }
        let num = |t: &str| {
            t.parse::<usize>().map_err(|_| Error::Parse {
                column: col,
                message: format!("expected an integer, found {t:?}"),
            })
        };
        let eps = num(fields[2])?;
        if eps > 2 {
            return Err(Error::Parse { column: col, message: format!("eps must be 0, 1 or 2, got {eps}") });
        }
        out.push((num(fields[0])?, num(fields[1])?, eps as u8));
        col += chunk.len() + 1;
    }
    Ok(out)
}
