//! Two-sided Fisher exact test on 2x2 contingency tables.

#[allow(unused_imports)] // Inherent methods take over when std is linked.
use num_traits::Float;
use alloc::vec::Vec;

use super::{TestError, TestKind, TestOutcome};

/// Tables whose point probability is within this relative distance of the
/// observed one count as equally extreme.
const TIE_SLACK: f64 = 1e-12;

fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Hypergeometric probability of the table `[[a, b], [c, d]]` given its
/// margins.
///
/// The value depends only on the multisets of margins and cells, so row
/// swaps, column swaps and transposition give bit-identical results.
pub fn hypergeometric_pmf(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let n = a + b + c + d;
    let mut margins = [a + b, c + d, a + c, b + d];
    let mut cells = [a, b, c, d];
    margins.sort_unstable();
    cells.sort_unstable();
    let up: f64 = margins.iter().map(|&k| ln_factorial(k)).sum();
    let down: f64 = cells.iter().map(|&k| ln_factorial(k)).sum::<f64>() + ln_factorial(n);
    (up - down).exp()
}

/// Fisher test on the table `[[a, b], [c, d]]`.
///
/// A zero margin leaves only one table, so the p-value is 1.
pub fn fisher_table(a: u64, b: u64, c: u64, d: u64) -> TestOutcome {
    let observed = hypergeometric_pmf(a, b, c, d);
    let (r1, r2, c1) = (a + b, c + d, a + c);
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let bound = observed * (1.0 + TIE_SLACK);
    let mut extreme: Vec<f64> = (lo..=hi)
        .map(|x| hypergeometric_pmf(x, r1 - x, c1 - x, r2 - (c1 - x)))
        .filter(|&p| p <= bound)
        .collect();
    // Summing in a fixed order keeps the result independent of table
    // orientation.
    extreme.sort_by(f64::total_cmp);
    let p: f64 = extreme.iter().sum();
    TestOutcome { p_value: p.clamp(0.0, 1.0), statistic: observed, test: TestKind::Fisher }
}

/// Level indicator: `true` for the larger of the (at most two) values.
fn indicator(values: &[f64]) -> Result<Vec<bool>, TestError> {
    let low = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut high: Option<f64> = None;
    for &v in values {
        if v != low {
            match high {
                None => high = Some(v),
                Some(h) if h == v => {}
                Some(_) => return Err(TestError::NotBinary),
            }
        }
    }
    Ok(values.iter().map(|&v| v != low).collect())
}

/// Fisher test of association between two binary vectors.
pub fn fisher_exact(x: &[f64], y: &[f64]) -> Result<TestOutcome, TestError> {
    if x.len() != y.len() {
        return Err(TestError::LengthMismatch { expected: y.len(), found: x.len() });
    }
    let xi = indicator(x)?;
    let yi = indicator(y)?;
    let mut table = [0u64; 4];
    for (&u, &v) in xi.iter().zip(&yi) {
        table[2 * usize::from(u) + usize::from(v)] += 1;
    }
    Ok(fisher_table(table[0], table[1], table[2], table[3]))
}
