//! Autoregressive fits and the augmented Dickey-Fuller statistic.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::LeastSquares;

/// Integer cube root: the largest `p` with `p^3 <= x`.
pub fn icbrt(x: usize) -> usize {
    let mut p = 0usize;
    while (p + 1).pow(3) <= x {
        p += 1;
    }
    p
}

/// Conditional least-squares fit of
/// `s_nu = phi_0 + sum_{j=1}^{k} phi_j s_{nu-j} + eps`.
///
/// Returns `phi_0..=phi_k`, or `None` when fewer than `k + 1` equations are
/// available or the lagged design is rank deficient.
pub fn ar_coefficients(values: &[f64], max_lag: usize) -> Option<Vec<f64>> {
    let n = values.len();
    if max_lag >= n || n - max_lag < max_lag + 1 {
        return None;
    }
    let rows = n - max_lag;
    let mut columns = Vec::with_capacity(max_lag + 1);
    columns.push(vec![1.0; rows]);
    for j in 1..=max_lag {
        columns.push(values[max_lag - j..n - j].to_vec());
    }
    LeastSquares::fit(columns, &values[max_lag..]).map(|fit| fit.coefficients().to_vec())
}

/// Lag order used by the ADF regression: `floor((n - 1)^(1/3))`.
pub fn adf_lag_order(n: usize) -> usize {
    icbrt(n.saturating_sub(1))
}

/// t statistic of `gamma` in
/// `ds_nu = c + gamma s_{nu-1} + sum_{j=1}^{p} beta_j ds_{nu-j} + eps`.
///
/// `None` when the regression has no residual degrees of freedom or is rank
/// deficient.
pub fn adf_statistic(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let p = adf_lag_order(n);
    let diff: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    // diff[t] = s_{t+1} - s_t; responses are diff[p..].
    let rows = diff.len().checked_sub(p)?;
    if rows <= p + 2 {
        return None;
    }
    let mut columns = Vec::with_capacity(p + 2);
    columns.push(vec![1.0; rows]);
    columns.push(values[p..p + rows].to_vec());
    for j in 1..=p {
        columns.push(diff[p - j..p - j + rows].to_vec());
    }
    let fit = LeastSquares::fit(columns, &diff[p..])?;
    fit.t_statistic(1)
}
