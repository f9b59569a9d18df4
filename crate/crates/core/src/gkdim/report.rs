//! End-to-end growth report for one module.

use serde::{Deserialize, Serialize};

use super::degree::{binomial_lower_bound, estimate_degree, power_upper_bound, DegreeMethod};
use super::hitting::{hitting_polynomials_with, Certificate, HittingPolynomial, SigmaConvention};
use super::span::{generator_entries, span_closure};
use crate::corep::{corep_dim, AlgebraSpec, WordAction};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::weyl::{Family, ParabolicSubset, WeylGroup};

/// Parameters of a growth run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub kmax: usize,
    /// Defaults to `kmax + 4`.
    pub cutoff: Option<usize>,
    pub tol: f64,
    pub tail_fraction: f64,
    /// Restrict the generating set to the last `m` rows.
    pub quotient_m: Option<usize>,
    pub seed: u64,
    pub sigma: SigmaConvention,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig { kmax: 12, cutoff: None, tol: 1e-8, tail_fraction: 0.5, quotient_m: None, seed: 0, sigma: SigmaConvention::Literal }
    }
}

impl GrowthConfig {
    pub fn cutoff(&self) -> usize {
        self.cutoff.unwrap_or(self.kmax + 4)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub family: Family,
    pub rank: usize,
    pub word: Vec<usize>,
    pub length: usize,
    pub q: f64,
    /// Torus point as `[re, im]` pairs.
    pub t: Vec<[f64; 2]>,
    pub cutoff: usize,
    pub tol: f64,
    pub dims: Vec<usize>,
    pub min_accepted_residual: f64,
    pub max_rejected_residual: f64,
    pub slope: f64,
    pub rounding_margin: f64,
    pub degree_method: DegreeMethod,
    pub estimated_gkdim: usize,
    pub target: usize,
    /// `d_k <= (a k + 1)^l` for every computed `k`.
    pub upper_bound_holds: bool,
    /// `d_{M0 k} >= C(k + l - 1, k)` whenever `M0 k <= kmax`.
    pub lower_bound_holds: bool,
    pub certificate: Certificate,
    pub quotient_m: Option<usize>,
    /// Quotient mode: every certificate polynomial uses generator rows only.
    pub certificate_in_quotient: Option<bool>,
    pub pass: bool,
}

impl GrowthReport {
    /// `k,dim` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,dim\n");
        for (k, d) in self.dims.iter().enumerate() {
            s.push_str(&format!("{k},{d}\n"));
        }
        s
    }
}

/// Rows `N_n - m + 1 ..= N_n` whose entries generate the quotient algebra.
pub fn quotient_rows(group: &WeylGroup, m: usize) -> Result<Vec<usize>> {
    let n = group.rank();
    if group.family() == Family::D {
        return Err(Error::Quotient("quotient spaces are only available for types A and C".into()));
    }
    if m == 0 || m > n {
        return Err(Error::Quotient(format!("m = {m} outside 1..={n}")));
    }
    let top = corep_dim(group);
    Ok((top + 1 - m..=top).collect())
}

/// Per-letter shift bound `a` of the upper bound `(a k + 1)^l`.
pub fn shift_bound(family: Family) -> usize {
    match family {
        Family::A | Family::D => 1,
        Family::C => 2,
    }
}

/// Builds the module of `word`, runs span closure, estimates the degree and
/// verifies the certificate of its normal form.
pub fn gk_report<T: Real>(spec: &AlgebraSpec<T>, word: &[usize], cfg: &GrowthConfig) -> Result<GrowthReport> {
    let group = spec.group();
    let element = group.word_to_element(word)?;
    let rows = match cfg.quotient_m {
        Some(m) => {
            let rows = quotient_rows(&group, m)?;
            let s = ParabolicSubset::standard(&group, group.rank() - m + 1)?;
            if !group.is_min_coset_rep(&element, &s)? {
                return Err(Error::Quotient(format!("word {word:?} is not a minimal coset representative for {:?}", s.roots())));
            }
            Some(rows)
        }
        None => None,
    };
    let action = WordAction::new(spec, word)?;
    let gens = generator_entries(&action, rows.as_deref());
    let cutoff = cfg.cutoff();
    let closure = span_closure(&action, &gens, cfg.kmax, cutoff, cfg.tol)?;
    let est = estimate_degree(&closure.dims, cfg.tail_fraction)?;

    let nf = group.normal_form(&element)?;
    let nf_word = nf.word();
    let certificate = if nf_word == word {
        hitting_polynomials_with(&action, &nf, cfg.seed, cfg.sigma)?
    } else {
        hitting_polynomials_with(&WordAction::new(spec, &nf_word)?, &nf, cfg.seed, cfg.sigma)?
    };
    let certificate_in_quotient = rows.as_ref().map(|rows| {
        certificate.blocks.iter().flat_map(|b| &b.polys).all(|p| match *p {
            HittingPolynomial::Entry { row, .. } => rows.contains(&row),
            HittingPolynomial::Commutator { a, b } => rows.contains(&a.0) && rows.contains(&b.0),
        })
    });

    let length = word.len();
    let a = shift_bound(group.family());
    let upper_bound_holds = closure.dims.iter().enumerate().all(|(k, &d)| d as u128 <= power_upper_bound(a, length, k));
    let m0 = certificate.m0;
    let lower_bound_holds =
        (0..=cfg.kmax / m0).all(|k| closure.dims[m0 * k] as u128 >= binomial_lower_bound(length, k));
    let pass = est.degree == length && certificate.passed() && certificate_in_quotient.unwrap_or(true);
    Ok(GrowthReport {
        family: group.family(),
        rank: group.rank(),
        word: word.to_vec(),
        length,
        q: spec.q().to_f64().unwrap_or(f64::NAN),
        t: spec.torus().iter().map(|z| [z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)]).collect(),
        cutoff,
        tol: cfg.tol,
        dims: closure.dims,
        min_accepted_residual: closure.min_accepted,
        max_rejected_residual: closure.max_rejected,
        slope: est.slope,
        rounding_margin: est.rounding_margin,
        degree_method: est.method,
        estimated_gkdim: est.degree,
        target: length,
        upper_bound_holds,
        lower_bound_holds,
        certificate,
        quotient_m: cfg.quotient_m,
        certificate_in_quotient,
        pass,
    })
}
