//! Kendall rank correlation `tau_b` with Knight's merge-sort pair counting.

#[allow(unused_imports)] // Inherent methods take over when std is linked.
use num_traits::Float;
use alloc::vec::Vec;

use super::{TestError, TestKind, TestOutcome};

/// Sizes of runs of equal adjacent values (only runs longer than 1).
fn tie_runs(sorted: impl Iterator<Item = (f64, f64)>, same: impl Fn((f64, f64), (f64, f64)) -> bool) -> Vec<u64> {
    let mut runs = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut len = 0u64;
    for item in sorted {
        match prev {
            Some(p) if same(p, item) => len += 1,
            _ => {
                if len > 1 {
                    runs.push(len);
                }
                len = 1;
            }
        }
        prev = Some(item);
    }
    if len > 1 {
        runs.push(len);
    }
    runs
}

fn pairs(runs: &[u64]) -> u64 {
    runs.iter().map(|t| t * (t - 1) / 2).sum()
}

/// Sorts `v` ascending and returns the number of inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], &mut buf[..mid]) + merge_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Pair counts for `tau_b`.
struct Counts {
    /// Concordant minus discordant pairs.
    s: i64,
    n0: u64,
    x_ties: Vec<u64>,
    y_ties: Vec<u64>,
}

fn counts(x: &[f64], y: &[f64]) -> Counts {
    let n = x.len() as u64;
    let mut pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let x_ties = tie_runs(pts.iter().copied(), |a, b| a.0 == b.0);
    let joint = pairs(&tie_runs(pts.iter().copied(), |a, b| a == b));
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let mut buf = alloc::vec![0.0; ys.len()];
    let swaps = merge_count(&mut ys, &mut buf);
    let y_ties = tie_runs(ys.iter().map(|&v| (v, 0.0)), |a, b| a.0 == b.0);
    let n0 = n * (n - 1) / 2;
    let s = n0 as i64 - pairs(&x_ties) as i64 - pairs(&y_ties) as i64 + joint as i64 - 2 * swaps as i64;
    Counts { s, n0, x_ties, y_ties }
}

/// Variance of `S = C - D` under independence, corrected for ties.
pub fn kendall_variance(n: u64, x_ties: &[u64], y_ties: &[u64]) -> f64 {
    let nf = n as f64;
    let sum = |runs: &[u64], f: fn(f64) -> f64| runs.iter().map(|&t| f(t as f64)).sum::<f64>();
    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let vt = sum(x_ties, |t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum(y_ties, |t| t * (t - 1.0) * (2.0 * t + 5.0));
    let v1 = sum(x_ties, |t| t * (t - 1.0)) * sum(y_ties, |t| t * (t - 1.0)) / (2.0 * nf * (nf - 1.0));
    let v2 = if n < 3 {
        0.0
    } else {
        sum(x_ties, |t| t * (t - 1.0) * (t - 2.0)) * sum(y_ties, |t| t * (t - 1.0) * (t - 2.0))
            / (9.0 * nf * (nf - 1.0) * (nf - 2.0))
    };
    (v0 - vt - vu) / 18.0 + v1 + v2
}

/// Kendall `tau_b` and its two-sided normal-approximation p-value.
pub fn kendall_rank(x: &[f64], y: &[f64]) -> Result<TestOutcome, TestError> {
    if x.len() != y.len() {
        return Err(TestError::LengthMismatch { expected: y.len(), found: x.len() });
    }
    let n = x.len() as u64;
    if n < 2 {
        return Err(TestError::ConstantInput);
    }
    let c = counts(x, y);
    let nx = c.n0 - pairs(&c.x_ties);
    let ny = c.n0 - pairs(&c.y_ties);
    if nx == 0 || ny == 0 {
        return Err(TestError::ConstantInput);
    }
    let tau = c.s as f64 / ((nx as f64) * (ny as f64)).sqrt();
    let var = kendall_variance(n, &c.x_ties, &c.y_ties);
    let z = c.s as f64 / var.sqrt();
    let p = libm::erfc(z.abs() / core::f64::consts::SQRT_2);
    Ok(TestOutcome { p_value: p.clamp(0.0, 1.0), statistic: tau.clamp(-1.0, 1.0), test: TestKind::Kendall })
}
