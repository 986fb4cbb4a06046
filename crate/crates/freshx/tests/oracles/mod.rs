//! Slow, direct evaluations of the catalog formulas and test statistics.
//!
//! Nothing here calls into the library's numeric code; every quantity is
//! recomputed from its definition with plain loops.

use std::f64::consts::PI;

use freshx_core::MappingSpec;

fn mean(s: &[f64]) -> f64 {
    let mut total = 0.0;
    for &v in s {
        total += v;
    }
    total / s.len() as f64
}

fn var(s: &[f64]) -> f64 {
    let m = mean(s);
    let mut total = 0.0;
    for &v in s {
        total += (v - m) * (v - m);
    }
    total / s.len() as f64
}

fn sorted(s: &[f64]) -> Vec<f64> {
    let mut v = s.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn median(s: &[f64]) -> f64 {
    let v = sorted(s);
    let n = v.len();
    if n % 2 == 1 {
        v[n.div_ceil(2) - 1]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Smallest sample value `z` with `#{s <= z} / n >= q`.
pub fn quantile(s: &[f64], q: f64) -> f64 {
    let v = sorted(s);
    let n = v.len() as f64;
    for &z in &v {
        let count = s.iter().filter(|&&x| x <= z).count();
        if count as f64 / n >= q {
            return z;
        }
    }
    unreachable!("the maximum always qualifies")
}

fn longest_run(s: &[f64], pred: impl Fn(f64) -> bool) -> f64 {
    let mut best = 0;
    for start in 0..s.len() {
        let mut len = 0;
        while start + len < s.len() && pred(s[start + len]) {
            len += 1;
        }
        best = best.max(len);
    }
    best as f64
}

fn peaks(s: &[f64], l: usize) -> usize {
    let mut count = 0;
    for i in 0..s.len() {
        if i < l || i + l >= s.len() {
            continue;
        }
        let mut peak = true;
        for j in 1..=l {
            if !(s[i] > s[i - j] && s[i] > s[i + j]) {
                peak = false;
            }
        }
        if peak {
            count += 1;
        }
    }
    count
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// The printed Ricker wavelet at offset `t = nu - b`.
pub fn ricker(t: f64, a: f64) -> f64 {
    let amplitude = 2.0 / ((3.0 * a).sqrt() * PI.powf(0.25));
    let x2 = (t * t) / (a * a);
    amplitude * (1.0 - x2) * (-x2 / 2.0).exp()
}

/// `sum_nu s_nu psi(nu, a, b)` over all samples.
pub fn cwt_direct(s: &[f64], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for (nu, &v) in s.iter().enumerate() {
        total += v * ricker(nu as f64 - b, a);
    }
    total
}

/// Real and imaginary part of `sum_nu s_nu exp(-2 pi i k nu / n)`.
pub fn dft(s: &[f64], k: usize) -> (f64, f64) {
    let n = s.len();
    let (mut re, mut im) = (0.0, 0.0);
    for (nu, &v) in s.iter().enumerate() {
        let angle = 2.0 * PI * ((k * nu) % n) as f64 / n as f64;
        re += v * angle.cos();
        im -= v * angle.sin();
    }
    (re, im)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting; `None`
/// for a (numerically) singular matrix.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let p = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..p {
        let pivot = (col..p).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..p {
            let f = a[row][col] / a[col][col];
            for k in col..p {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let mut acc = b[i];
        for k in i + 1..p {
            acc -= a[i][k] * x[k];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}

/// Ordinary least squares through the normal equations, polished by a few
/// rounds of iterative refinement. Returns coefficients, residual sum of
/// squares and the diagonal of `(X'X)^{-1}`.
fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64, Vec<f64>)> {
    let p = rows[0].len();
    let mut gram = vec![vec![0.0; p]; p];
    for r in rows {
        for i in 0..p {
            for j in 0..p {
                gram[i][j] += r[i] * r[j];
            }
        }
    }
    let xty = |res: &[f64]| -> Vec<f64> {
        (0..p).map(|i| rows.iter().zip(res).map(|(r, v)| r[i] * v).sum()).collect()
    };
    let residuals = |beta: &[f64]| -> Vec<f64> {
        rows.iter().zip(y).map(|(r, v)| v - r.iter().zip(beta).map(|(x, b)| x * b).sum::<f64>()).collect()
    };
    let mut beta = solve(gram.clone(), xty(y))?;
    for _ in 0..3 {
        let delta = solve(gram.clone(), xty(&residuals(&beta)))?;
        for (b, d) in beta.iter_mut().zip(delta) {
            *b += d;
        }
    }
    let rss = residuals(&beta).iter().map(|r| r * r).sum();
    let mut diag = Vec::with_capacity(p);
    for j in 0..p {
        let e: Vec<f64> = (0..p).map(|i| indicator(i == j)).collect();
        diag.push(solve(gram.clone(), e)?[j]);
    }
    Some((beta, rss, diag))
}

fn ar(s: &[f64], i: usize, k: usize) -> Option<f64> {
    let n = s.len();
    if k >= n || n - k < k + 1 {
        return None;
    }
    let rows: Vec<Vec<f64>> =
        (k..n).map(|nu| std::iter::once(1.0).chain((1..=k).map(|j| s[nu - j])).collect()).collect();
    let y: Vec<f64> = s[k..].to_vec();
    least_squares(&rows, &y).map(|(beta, _, _)| beta[i])
}

fn adf(s: &[f64]) -> Option<f64> {
    let n = s.len();
    let mut p = 0;
    while (p + 1) * (p + 1) * (p + 1) < n {
        p += 1;
    }
    let d: Vec<f64> = (0..n - 1).map(|t| s[t + 1] - s[t]).collect();
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for t in p..n - 1 {
        let mut row = vec![1.0, s[t]];
        for j in 1..=p {
            row.push(d[t - j]);
        }
        rows.push(row);
        y.push(d[t]);
    }
    let cols = p + 2;
    if rows.len() <= cols {
        return None;
    }
    let (beta, rss, diag) = least_squares(&rows, &y)?;
    let sigma2 = rss / (rows.len() - cols) as f64;
    Some(beta[1] / (sigma2 * diag[1]).sqrt())
}

fn welch(s: &[f64], index: usize) -> Option<f64> {
    let n = s.len();
    let len = n.min(256);
    if index > len / 2 {
        return None;
    }
    let step = len - len / 2;
    let window: Vec<f64> = (0..len).map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / len as f64).cos()).collect();
    let norm: f64 = window.iter().map(|w| w * w).sum();
    let mut periodograms = Vec::new();
    let mut start = 0;
    while start + len <= n {
        let segment = &s[start..start + len];
        let m = mean(segment);
        let x: Vec<f64> = segment.iter().zip(&window).map(|(v, w)| (v - m) * w).collect();
        let power: Vec<f64> = (0..len)
            .map(|f| {
                let (re, im) = dft(&x, f);
                (re * re + im * im) / norm
            })
            .collect();
        periodograms.push(power);
        start += step;
    }
    let mut value = periodograms.iter().map(|p| p[index]).sum::<f64>() / periodograms.len() as f64;
    if index > 0 && !(len.is_multiple_of(2) && index == len / 2) {
        value *= 2.0;
    }
    Some(value)
}

fn cwt_rows(s: &[f64], l: usize) -> Vec<Vec<f64>> {
    let n = s.len();
    (1..=l)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut total = 0.0;
                    for (nu, &v) in s.iter().enumerate() {
                        if nu.abs_diff(b) <= 5 * a {
                            total += v * ricker(nu as f64 - b as f64, a as f64);
                        }
                    }
                    total
                })
                .collect()
        })
        .collect()
}

/// Ridge-line peak count following the documented linking rules, with
/// linear scans in place of any indexing.
fn cwt_peaks(s: &[f64], l: usize) -> usize {
    let rows = cwt_rows(s, l);
    let n = s.len();
    struct Ridge {
        points: Vec<(usize, usize)>,
        active: bool,
    }
    let mut ridges: Vec<Ridge> = Vec::new();
    for a in (1..=l).rev() {
        let row = &rows[a - 1];
        let maxima: Vec<usize> = (1..n.saturating_sub(1)).filter(|&b| row[b] > row[b - 1] && row[b] > row[b + 1]).collect();
        let mut claimed = vec![false; maxima.len()];
        let reach = a.div_ceil(4);
        let mut order: Vec<usize> = (0..ridges.len()).filter(|&r| ridges[r].active).collect();
        order.sort_by_key(|&r| ridges[r].points.last().unwrap().1);
        for r in order {
            let pos = ridges[r].points.last().unwrap().1;
            let mut best: Option<usize> = None;
            for (idx, &b) in maxima.iter().enumerate() {
                if claimed[idx] || b.abs_diff(pos) > reach {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(cur) => b.abs_diff(pos) < maxima[cur].abs_diff(pos),
                };
                if better {
                    best = Some(idx);
                }
            }
            match best {
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
    let mut count = 0;
    for ridge in &ridges {
        if ridge.points.len() < l.div_ceil(4) {
            continue;
        }
        let (a, b) = *ridge.points.last().unwrap();
        let signal = rows[a - 1][b];
        let lo = b.saturating_sub(l);
        let hi = (b + l).min(n - 1);
        let window: Vec<f64> = rows[0][lo..=hi].iter().map(|v| v.abs()).collect();
        let noise = quantile(&window, 0.1);
        let ok = if noise == 0.0 { signal > 0.0 } else { signal / noise >= 3.0 };
        if ok {
            count += 1;
        }
    }
    count
}

/// Direct evaluation of one mapping. `None` when the value is undefined for
/// this series (parameters out of range, singular regression, non-finite
/// result).
pub fn mapping(spec: &MappingSpec, s: &[f64]) -> Option<f64> {
    use MappingSpec::*;
    let n = s.len();
    let nf = n as f64;
    let max = s.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let min = s.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let mu = mean(s);
    let variance = var(s);
    let std = variance.sqrt();
    let med = median(s);
    let value = match *spec {
        Maximum => max,
        Minimum => min,
        Mean => mu,
        Var => variance,
        Std => std,
        Skewness => {
            let m3: f64 = s.iter().map(|v| (v - mu).powi(3)).sum::<f64>() / nf;
            let s2: f64 = s.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (nf - 1.0);
            nf * nf / ((nf - 1.0) * (nf - 2.0)) * m3 / s2.powf(1.5)
        }
        Kurtosis => s.iter().map(|v| ((v - mu) / std).powi(4)).sum::<f64>() / nf - 3.0,
        Length => nf,
        Median => med,
        Quantile { q } => quantile(s, q),
        AbsoluteEnergy => s.iter().map(|v| v * v).sum(),
        AugmentedDickeyFullerTestStatistic => adf(s)?,
        BinnedEntropy { bins } => {
            let mut counts = vec![0usize; bins];
            for &v in s {
                let k = if max > min { (((v - min) / (max - min) * bins as f64).floor() as usize).min(bins - 1) } else { 0 };
                counts[k] += 1;
            }
            let mut total = 0.0;
            for &c in &counts {
                if c > 0 {
                    let p = c as f64 / nf;
                    total += p * p.ln();
                }
            }
            total
        }
        HasLargeStandardDeviation => indicator(std > (max - min) / 2.0),
        HasVarianceLargerThanStd => indicator(variance > std),
        IsSymmetricLooking => indicator((mu - med).abs() < (max - min) / 2.0),
        MassQuantile { q } => {
            let mut found = None;
            for i in 1..=n {
                let partial: f64 = s[..i].iter().sum();
                if partial / mu >= q {
                    found = Some(i as f64 / nf);
                    break;
                }
            }
            found?
        }
        NumberDataPointsAboveMean => s.iter().filter(|&&v| v > mu).count() as f64,
        NumberDataPointsAboveMedian => s.iter().filter(|&&v| v > med).count() as f64,
        NumberDataPointsBelowMean => s.iter().filter(|&&v| v < mu).count() as f64,
        NumberDataPointsBelowMedian => s.iter().filter(|&&v| v < med).count() as f64,
        ArimaModelCoefficients { coeff, max_lag } => ar(s, coeff, max_lag)?,
        CwtCoefficients { width, position } => cwt_direct(s, width as f64, (position * nf).floor()),
        FftCoefficient { k } => dft(s, k % n).0,
        FirstIndexMax => (s.iter().position(|&v| v == max).unwrap() + 1) as f64 / nf,
        FirstIndexMin => (s.iter().position(|&v| v == min).unwrap() + 1) as f64 / nf,
        LastIndexMax => (s.iter().rposition(|&v| v == max).unwrap() + 1) as f64 / nf,
        LastIndexMin => (s.iter().rposition(|&v| v == min).unwrap() + 1) as f64 / nf,
        LaggedAutocorrelation { lag } => {
            if lag >= n {
                return None;
            }
            (0..n - lag).map(|i| (s[i] - mu) * (s[i + lag] - mu)).sum::<f64>() / variance
        }
        LargeNumberOfPeaks { support, threshold } => indicator(peaks(s, support) > threshold),
        LongestStrikeAboveMean => longest_run(s, |v| v >= mu),
        LongestStrikeAboveMedian => longest_run(s, |v| v >= med),
        LongestStrikeBelowMean => longest_run(s, |v| v <= mu),
        LongestStrikeBelowMedian => longest_run(s, |v| v <= med),
        LongestStrikeNegative => longest_run(s, |v| v < 0.0),
        LongestStrikePositive => longest_run(s, |v| v > 0.0),
        LongestStrikeZero => longest_run(s, |v| v == 0.0),
        MeanAbsoluteChange => (0..n - 1).map(|i| (s[i + 1] - s[i]).abs()).sum::<f64>() / nf,
        MeanAbsoluteChangeQuantiles { lower, upper } => {
            let (lo, hi) = (quantile(s, lower), quantile(s, upper));
            let inside = |v: f64| lo <= v && v <= hi;
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..n - 1 {
                let w = indicator(inside(s[i])) * indicator(inside(s[i + 1]));
                num += (s[i + 1] - s[i]).abs() * w;
                den += w;
            }
            if den == 0.0 {
                0.0
            } else {
                num / den
            }
        }
        MeanAutocorrelation => {
            let mut total = 0.0;
            for l in 1..=n {
                for nu in 0..n - l {
                    total += (s[nu] - mu) * (s[nu + l] - mu);
                }
            }
            total / ((nf - 1.0) * variance)
        }
        MeanSecondDerivateCentral => {
            // nu = 2..=n-2 in 1-based positions.
            let mut total = 0.0;
            for nu in 2..=n - 2 {
                total += 0.5 * (s[nu - 2] - 2.0 * s[nu - 1] + s[nu]);
            }
            total / (nf - 2.0)
        }
        NumberCwtPeaks { max_width } => cwt_peaks(s, max_width) as f64,
        NumberPeaks { support } => peaks(s, support) as f64,
        SpektralWelchDensity { index } => welch(s, index)?,
        TimeReversalAsymmetryStatistic { lag } => {
            if 2 * lag >= n {
                return None;
            }
            let count = n - 2 * lag;
            (0..count).map(|nu| s[nu + 2 * lag].powi(2) * s[nu + lag] - s[nu + lag] * s[nu].powi(2)).sum::<f64>()
                / count as f64
        }
    };
    value.is_finite().then_some(value)
}

fn binomial(n: u64, k: u64) -> u128 {
    let mut c = 1u128;
    for i in 0..k {
        c = c * u128::from(n - i) / u128::from(i + 1);
    }
    c
}

/// Two-sided Fisher p-value for `[[a, b], [c, d]]` by exact enumeration of
/// tables with the same margins: the probability of all tables no more
/// likely than the observed one.
pub fn fisher_p(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let (r1, r2, c1) = (a + b, c + d, a + c);
    let weight = |x: u64| binomial(r1, x) * binomial(r2, c1 - x);
    let observed = weight(a);
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let mut extreme = 0u128;
    for x in lo..=hi {
        if weight(x) <= observed {
            extreme += weight(x);
        }
    }
    extreme as f64 / binomial(r1 + r2, c1) as f64
}

/// `sup_z |F_a(z) - F_b(z)|` as `(numerator, |a| |b|)`, evaluating both
/// ECDFs at every observed value.
pub fn ks_d(a: &[f64], b: &[f64]) -> (u64, u64) {
    let (na, nb) = (a.len() as u64, b.len() as u64);
    let mut best = 0u64;
    for &z in a.iter().chain(b) {
        let ca = a.iter().filter(|&&v| v <= z).count() as u64;
        let cb = b.iter().filter(|&&v| v <= z).count() as u64;
        best = best.max((ca * nb).abs_diff(cb * na));
    }
    (best, na * nb)
}

/// Kendall `tau_b` by pair enumeration; `None` when either variable is
/// constant.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut s, mut tx, mut ty, mut pairs) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            pairs += 1;
            let dx = (x[i] - x[j]).signum() as i64 * i64::from(x[i] != x[j]);
            let dy = (y[i] - y[j]).signum() as i64 * i64::from(y[i] != y[j]);
            s += dx * dy;
            tx += i64::from(dx == 0);
            ty += i64::from(dy == 0);
        }
    }
    let (nx, ny) = (pairs - tx, pairs - ty);
    if nx == 0 || ny == 0 {
        return None;
    }
    Some(s as f64 / ((nx as f64) * (ny as f64)).sqrt())
}

/// Step-up Benjamini-Yekutieli over the full harmonic constant.
pub fn by_reject(p: &[f64], q: f64) -> Vec<bool> {
    let n = p.len();
    let c: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| p[i].partial_cmp(&p[j]).unwrap());
    let mut k_max = 0;
    for k in 1..=n {
        if p[order[k - 1]] <= k as f64 * q / (n as f64 * c) {
            k_max = k;
        }
    }
    let mut reject = vec![false; n];
    for &i in &order[..k_max] {
        reject[i] = true;
    }
    reject
}

/// `sup_x |ECDF(x) - x|` of a sample from `[0, 1]`.
pub fn distance_from_uniform(p: &[f64]) -> f64 {
    let v = sorted(p);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        d = d.max((i + 1) as f64 / n - x).max(x - i as f64 / n);
    }
    d
}
