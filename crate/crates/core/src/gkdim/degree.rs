//! Polynomial growth degree of a dimension sequence `d_0, d_1, ...`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the integer degree was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeMethod {
    /// The sequence is constant on the tail.
    Constant,
    /// `d_k` agrees with a polynomial of the reported degree for all
    /// `k >= from_k`; `checks` vanishing higher differences confirm it.
    FiniteDifference { from_k: usize, checks: usize },
    /// Least squares fit of `ln d_k ~ m ln(k + offset) + b`.
    LogLogOffset { offset: f64, exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeEstimate {
    /// Plain least squares slope of `ln d_k` against `ln k` on the tail.
    pub slope: f64,
    /// Distance of `slope` from the nearest half integer: 0.5 means the
    /// slope sits exactly on an integer.
    pub rounding_margin: f64,
    /// First `k` of the slope window.
    pub window_start: usize,
    pub degree: usize,
    pub method: DegreeMethod,
}

/// Minimum number of points in the slope window.
pub const MIN_WINDOW: usize = 4;

fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn lsq_residual(xs: &[f64], ys: &[f64], m: f64) -> f64 {
    let n = xs.len() as f64;
    let b = (ys.iter().sum::<f64>() - m * xs.iter().sum::<f64>()) / n;
    xs.iter().zip(ys).map(|(x, y)| (y - m * x - b).powi(2)).sum()
}

/// Lowest degree `m` such that the `(m+1)`-th differences vanish exactly on
/// some tail `[k0, kmax]` holding at least `m + 3` points.
fn finite_difference_degree(dims: &[usize]) -> Option<(usize, usize, usize)> {
    let kmax = dims.len().checked_sub(1)?;
    let max_m = dims.len().saturating_sub(3);
    for m in 0..=max_m {
        // longest tail first, so the reported `from_k` is minimal
        for k0 in 1..=kmax {
            let tail: Vec<i128> = dims[k0..].iter().map(|&d| d as i128).collect();
            if tail.len() < m + 3 {
                break;
            }
            let mut diff = tail;
            for _ in 0..=m {
                diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
            }
            if diff.iter().all(|&x| x == 0) {
                return Some((m, k0, diff.len()));
            }
        }
    }
    None
}

fn offset_fit(dims: &[usize]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = dims.iter().enumerate().skip(1).map(|(k, &d)| (k as f64, (d as f64).ln())).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for step in 0..=400 {
        let c = step as f64 * 0.05;
        let xs: Vec<f64> = pts.iter().map(|p| (p.0 + c).ln()).collect();
        let m = lsq_slope(&xs, &ys);
        let r = lsq_residual(&xs, &ys, m);
        if r < best.0 {
            best = (r, c, m);
        }
    }
    (best.1, best.2)
}

/// Estimates the growth degree of `dims` (indexed by `k`).
///
/// The slope window is the top `tail_fraction` of `1..=kmax`, but never
/// below `k = 4`. The integer degree comes from exact finite differences
/// when the sequence is polynomial on a tail, otherwise from an offset
/// log-log fit.
pub fn estimate_degree(dims: &[usize], tail_fraction: f64) -> Result<DegreeEstimate> {
    let kmax = dims.len().saturating_sub(1);
    let start = ((kmax as f64 * (1.0 - tail_fraction)).ceil() as usize).max(4);
    let got = (kmax + 1).saturating_sub(start);
    if got < MIN_WINDOW {
        return Err(Error::DegenerateWindow { needed: MIN_WINDOW, got });
    }
    let xs: Vec<f64> = (start..=kmax).map(|k| (k as f64).ln()).collect();
    let ys: Vec<f64> = dims[start..].iter().map(|&d| (d.max(1) as f64).ln()).collect();
    let slope = lsq_slope(&xs, &ys);
    let rounding_margin = 0.5 - (slope - slope.round()).abs();

    let (degree, method) = if dims[start..].iter().all(|&d| d == dims[start]) {
        (0, DegreeMethod::Constant)
    } else if let Some((m, from_k, checks)) = finite_difference_degree(dims) {
        (m, DegreeMethod::FiniteDifference { from_k, checks })
    } else {
        let (offset, exponent) = offset_fit(dims);
        (exponent.round().max(0.0) as usize, DegreeMethod::LogLogOffset { offset, exponent })
    };
    Ok(DegreeEstimate { slope, rounding_margin, window_start: start, degree, method })
}

/// `C(k + l - 1, k)`, the number of monomials of degree `k` in `l`
/// commuting variables.
pub fn binomial_lower_bound(l: usize, k: usize) -> u128 {
    if l == 0 {
        return u128::from(k == 0);
    }
    binomial((k + l - 1) as u128, k as u128)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// `(a k + 1)^l`.
pub fn power_upper_bound(a: usize, l: usize, k: usize) -> u128 {
    ((a * k + 1) as u128).pow(l as u32)
}
