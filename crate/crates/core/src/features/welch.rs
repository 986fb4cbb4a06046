//! Welch power spectral density estimate at a single frequency bin.
//!
//! Segments of `min(256, n)` samples with 50% overlap, periodic Hann window,
//! per-segment mean removal, one-sided density at unit sampling rate.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // Inherent methods take over when std is linked.
use num_traits::Float;

pub const MAX_SEGMENT: usize = 256;

/// Segment length used for a series of length `n`.
pub fn segment_len(n: usize) -> usize {
    n.min(MAX_SEGMENT)
}

/// Number of one-sided frequency bins for a series of length `n`.
pub fn n_bins(n: usize) -> usize {
    segment_len(n) / 2 + 1
}

fn hann(len: usize) -> Vec<f64> {
    (0..len).map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / len as f64).cos()).collect()
}

/// Power at frequency bin `index` (frequency `index / segment_len`), or
/// `None` when the bin does not exist for this length.
pub fn density_at(values: &[f64], index: usize) -> Option<f64> {
    let n = values.len();
    let len = segment_len(n);
    if len == 0 || index >= n_bins(n) {
        return None;
    }
    let step = len - len / 2;
    let window = hann(len);
    let scale = 1.0 / window.iter().map(|w| w * w).sum::<f64>();
    let (cos_table, sin_table): (Vec<f64>, Vec<f64>) = (0..len)
        .map(|j| {
            let angle = 2.0 * PI * ((index * j) % len) as f64 / len as f64;
            (angle.cos(), angle.sin())
        })
        .unzip();

    let n_segments = (n - len) / step + 1;
    let mut total = 0.0;
    for s in 0..n_segments {
        let segment = &values[s * step..s * step + len];
        let mean = segment.iter().sum::<f64>() / len as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for j in 0..len {
            let x = (segment[j] - mean) * window[j];
            re += x * cos_table[j];
            im -= x * sin_table[j];
        }
        total += (re * re + im * im) * scale;
    }
    let mut power = total / n_segments as f64;
    let nyquist = len.is_multiple_of(2) && index == len / 2;
    if index != 0 && !nyquist {
        power *= 2.0;
    }
    Some(power)
}
