//! Scalar calculators on plain slices.
//!
//! Positions in formulas are 1-based as in the usual notation
//! `S = (s_1, ..., s_n)`; the code indexes from 0.

#[allow(unused_imports)] // Inherent methods take over when std is linked.
use num_traits::Float;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Uncorrected variance `1/n sum (s - mean)^2`.
pub fn variance(values: &[f64], mean: f64) -> f64 {
    sum_sq_dev(values, mean) / values.len() as f64
}

fn sum_sq_dev(values: &[f64], mean: f64) -> f64 {
    values.iter().map(|v| (v - mean) * (v - mean)).sum()
}

/// `inf { z : ECDF(z) >= q }` on ascending `sorted` values.
pub fn ecdf_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let nf = n as f64;
    let mut k = ((q * nf).ceil().max(1.0) as usize).min(n);
    while k > 1 && ((k - 1) as f64) / nf >= q {
        k -= 1;
    }
    while k < n && (k as f64) / nf < q {
        k += 1;
    }
    sorted[k - 1]
}

pub fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Adjusted Fisher-Pearson coefficient
/// `n^2 / ((n-1)(n-2)) * m3 / s^3` with `m3 = 1/n sum d^3` and
/// `s^2 = 1/(n-1) sum d^2`.
pub fn skewness(values: &[f64], mean: f64) -> f64 {
    let nf = values.len() as f64;
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / nf;
    let s2 = sum_sq_dev(values, mean) / (nf - 1.0);
    nf * nf / ((nf - 1.0) * (nf - 2.0)) * m3 / s2.powf(1.5)
}

/// `1/n sum ((s - mean) / std)^4 - 3` with the uncorrected standard deviation.
pub fn kurtosis(values: &[f64], mean: f64, std: f64) -> f64 {
    values.iter().map(|v| ((v - mean) / std).powi(4)).sum::<f64>() / values.len() as f64 - 3.0
}

/// `sum_k p_k ln p_k` over `bins` equidistant bins spanning `[min, max]`.
///
/// The sum carries no leading minus sign, so the value is `<= 0`.
pub fn binned_entropy(values: &[f64], min: f64, max: f64, bins: usize) -> f64 {
    let mut counts = alloc::vec![0usize; bins];
    let range = max - min;
    for &v in values {
        let idx = if range > 0.0 {
            (((v - min) / range * bins as f64).floor() as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    let nf = values.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / nf;
            p * p.ln()
        })
        .sum()
}

/// `i / n` for the smallest `i` with `(s_1 + ... + s_i) / mean >= q`.
/// NaN when no prefix qualifies or the mean is zero.
pub fn mass_quantile(values: &[f64], mean: f64, q: f64) -> f64 {
    if mean == 0.0 {
        return f64::NAN;
    }
    let mut cumulative = 0.0;
    for (i, v) in values.iter().enumerate() {
        cumulative += v;
        if cumulative / mean >= q {
            return (i + 1) as f64 / values.len() as f64;
        }
    }
    f64::NAN
}

pub fn count_where(values: &[f64], pred: impl Fn(f64) -> bool) -> f64 {
    values.iter().filter(|&&v| pred(v)).count() as f64
}

/// Length of the longest run of consecutive values satisfying `pred`.
pub fn longest_strike(values: &[f64], pred: impl Fn(f64) -> bool) -> f64 {
    let mut best = 0usize;
    let mut current = 0usize;
    for &v in values {
        if pred(v) {
            current += 1;
            best = best.max(current);
        } else {
            current = 0;
        }
    }
    best as f64
}

/// 1-based position of the first (or last) occurrence of the extreme value
/// selected by `better`, divided by `n`.
pub fn relative_extreme_index(values: &[f64], last: bool, better: impl Fn(f64, f64) -> bool) -> f64 {
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate().skip(1) {
        let b = values[best];
        if better(v, b) || (last && v == b) {
            best = i;
        }
    }
    (best + 1) as f64 / values.len() as f64
}

/// Number of values strictly greater than their `support` neighbours on both
/// sides. Points closer than `support` to either end cannot be peaks.
pub fn number_peaks(values: &[f64], support: usize) -> usize {
    let n = values.len();
    if n < 2 * support + 1 {
        return 0;
    }
    (support..n - support)
        .filter(|&i| (1..=support).all(|j| values[i] > values[i - j] && values[i] > values[i + j]))
        .count()
}

/// `1/var * sum_{nu=1}^{n-l} (s_nu - mean)(s_{nu+l} - mean)`.
pub fn lagged_autocorrelation(values: &[f64], mean: f64, var: f64, lag: usize) -> f64 {
    let n = values.len();
    let sum: f64 = (0..n - lag).map(|i| (values[i] - mean) * (values[i + lag] - mean)).sum();
    sum / var
}

/// `1/((n-1) var) * sum_{l=1}^{n} sum_{nu=1}^{n-l} d_nu d_{nu+l}` with
/// `d = s - mean`.
///
/// The double sum runs over all pairs `i < j`, so it equals
/// `((sum d)^2 - sum d^2) / 2`; with `var = sum d^2 / n` the whole expression
/// is `n / (2(n-1)) * ((sum d)^2 / sum d^2 - 1)`.
pub fn mean_autocorrelation(values: &[f64], mean: f64) -> f64 {
    let nf = values.len() as f64;
    let s1: f64 = values.iter().map(|v| v - mean).sum();
    let s2 = sum_sq_dev(values, mean);
    nf / (2.0 * (nf - 1.0)) * (s1 * s1 / s2 - 1.0)
}

/// `1/n sum_{nu=1}^{n-1} |s_{nu+1} - s_nu|`.
pub fn mean_absolute_change(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / values.len() as f64
}

/// Mean absolute change restricted to steps whose endpoints both lie in
/// `[low, high]`; 0 when no step qualifies.
pub fn mean_absolute_change_in_corridor(values: &[f64], low: f64, high: f64) -> f64 {
    let inside = |v: f64| low <= v && v <= high;
    let (mut sum, mut count) = (0.0, 0usize);
    for w in values.windows(2) {
        if inside(w[0]) && inside(w[1]) {
            sum += (w[1] - w[0]).abs();
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// `1/(n-2) sum_{nu=2}^{n-2} (s_{nu-1} - 2 s_nu + s_{nu+1}) / 2`.
pub fn mean_second_derivative_central(values: &[f64]) -> f64 {
    let n = values.len();
    let sum: f64 = (1..n.saturating_sub(2))
        .map(|i| 0.5 * (values[i - 1] - 2.0 * values[i] + values[i + 1]))
        .sum();
    sum / (n as f64 - 2.0)
}

/// `1/(n-2l) sum_{nu=1}^{n-2l} (s_{nu+2l}^2 s_{nu+l} - s_{nu+l} s_nu^2)`.
pub fn time_reversal_asymmetry(values: &[f64], lag: usize) -> f64 {
    let count = values.len() - 2 * lag;
    let sum: f64 = (0..count)
        .map(|i| {
            let (a, b, c) = (values[i], values[i + lag], values[i + 2 * lag]);
            c * c * b - b * a * a
        })
        .sum();
    sum / count as f64
}
