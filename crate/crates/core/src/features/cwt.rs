//! Ricker (Mexican hat) wavelet transform and ridge-line peak counting.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // Inherent methods take over when std is linked.
use num_traits::Float;

use super::summary::ecdf_quantile;

/// Half-width, in multiples of the wavelet width, of the kernel used for full
/// transform rows. At `5a` the wavelet has decayed below `1e-4` of its peak.
pub const KERNEL_HALF_WIDTH: usize = 5;

/// Minimum signal-to-noise ratio for a ridge to count as a peak.
pub const MIN_SNR: f64 = 3.0;

/// Percentile of `|X_w(1, .)|` used as the local noise level.
pub const NOISE_PERCENTILE: f64 = 0.1;

/// `psi(t; a)` where `t = nu - b` is the offset from the wavelet location.
pub fn ricker(t: f64, a: f64) -> f64 {
    let amplitude = 2.0 / ((3.0 * a).sqrt() * PI.powf(0.25));
    let x2 = (t * t) / (a * a);
    amplitude * (1.0 - x2) * (-x2 / 2.0).exp()
}

/// `X_w(a, b) = sum_nu s_nu psi(nu, a, b)` over the whole series (0-based
/// sample positions).
pub fn coefficient(values: &[f64], a: f64, b: f64) -> f64 {
    values.iter().enumerate().map(|(nu, &s)| s * ricker(nu as f64 - b, a)).sum()
}

/// Transform row for integer width `a` at every location, with the kernel
/// truncated to `|nu - b| <= 5a`.
pub fn row(values: &[f64], a: usize) -> Vec<f64> {
    let n = values.len();
    let half = KERNEL_HALF_WIDTH * a;
    let kernel: Vec<f64> = (0..=2 * half).map(|i| ricker(i as f64 - half as f64, a as f64)).collect();
    (0..n)
        .map(|b| {
            let lo = b.saturating_sub(half);
            let hi = (b + half).min(n - 1);
            (lo..=hi).map(|nu| values[nu] * kernel[nu + half - b]).sum()
        })
        .collect()
}

fn local_maxima(row: &[f64]) -> Vec<usize> {
    if row.len() < 3 {
        return Vec::new();
    }
    (1..row.len() - 1)
        .filter(|&b| {
            let v = row[b];
            v > row[b - 1] && v > row[b + 1]
        })
        .collect()
}

/// Index of the unclaimed entry of the sorted `maxima` closest to `pos` and
/// at most `max_distance` away; the left one wins a tie.
fn nearest_unclaimed(maxima: &[usize], claimed: &[bool], pos: usize, max_distance: usize) -> Option<usize> {
    let split = maxima.partition_point(|&b| b < pos);
    let left = (0..split)
        .rev()
        .take_while(|&i| pos - maxima[i] <= max_distance)
        .find(|&i| !claimed[i]);
    let right = (split..maxima.len())
        .take_while(|&i| maxima[i] - pos <= max_distance)
        .find(|&i| !claimed[i]);
    match (left, right) {
        (Some(l), Some(r)) => Some(if maxima[r] - pos < pos - maxima[l] { r } else { l }),
        (l, r) => l.or(r),
    }
}

struct Ridge {
    /// (width, position) pairs from the largest width downwards.
    points: Vec<(usize, usize)>,
    active: bool,
}

/// Counts ridge-line peaks over the rows for widths `1..=rows.len()`.
///
/// Ridges start at strict local maxima of `X_w` on the widest row and are followed
/// towards width 1, each step joining the nearest unclaimed maximum within
/// `ceil(a / 4)` positions (ties go to the smaller position). Maxima that no
/// ridge claims start new ridges. A ridge is a peak when it spans at least
/// `ceil(l / 4)` widths and its smallest-width coefficient is positive and at least
/// [`MIN_SNR`] times the local noise: the 10th percentile of `|X_w(1, .)|`
/// within `l` positions on either side.
pub fn count_ridge_peaks(rows: &[Vec<f64>]) -> usize {
    let l = rows.len();
    if l == 0 {
        return 0;
    }
    let n = rows[0].len();
    let mut ridges: Vec<Ridge> = Vec::new();
    for a in (1..=l).rev() {
        let maxima = local_maxima(&rows[a - 1]);
        let mut claimed = vec![false; maxima.len()];
        let max_distance = a.div_ceil(4);
        let mut order: Vec<usize> = (0..ridges.len()).filter(|&r| ridges[r].active).collect();
        order.sort_by_key(|&r| ridges[r].points.last().map_or(0, |p| p.1));
        for r in order {
            let (_, pos) = *ridges[r].points.last().expect("ridges are never empty");
            match nearest_unclaimed(&maxima, &claimed, pos, max_distance) {
                Some(idx) => {
                    claimed[idx] = true;
                    ridges[r].points.push((a, maxima[idx]));
                }
                None => ridges[r].active = false,
            }
        }
        for (idx, &b) in maxima.iter().enumerate() {
            if !claimed[idx] {
                ridges.push(Ridge { points: vec![(a, b)], active: true });
            }
        }
    }

    let min_length = l.div_ceil(4);
    let base = &rows[0];
    ridges
        .iter()
        .filter(|ridge| ridge.points.len() >= min_length)
        .filter(|ridge| {
            let &(a, b) = ridge.points.last().expect("ridges are never empty");
            let signal = rows[a - 1][b];
            let lo = b.saturating_sub(l);
            let hi = (b + l).min(n - 1);
            let mut window: Vec<f64> = base[lo..=hi].iter().map(|v| v.abs()).collect();
            window.sort_by(f64::total_cmp);
            let noise = ecdf_quantile(&window, NOISE_PERCENTILE);
            if noise == 0.0 {
                signal > 0.0
            } else {
                signal / noise >= MIN_SNR
            }
        })
        .count()
}
