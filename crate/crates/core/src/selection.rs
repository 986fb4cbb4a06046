//! Benjamini-Yekutieli step-up procedure and relevance tables.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{ByMode, FeatureMatrix, RelevanceRow, RelevanceTable, SelectionConfig, TargetVector};
use crate::stats::{dispatch_test, TestError, TestKind, TestOutcome};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SelectionError {
    #[error("FDR level {0} is outside (0, 1]")]
    InvalidQ(f64),
    #[error("p-value {value} at position {index} is outside [0, 1]")]
    InvalidP { index: usize, value: f64 },
    #[error("feature has {found} rows but the target has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Test(#[from] TestError),
}

/// Rejection mask of the Benjamini-Yekutieli step-up procedure, in input
/// order.
///
/// With p-values sorted ascending (stable), the `k`-th smallest is compared
/// with `k q / (n c)`, where `c = sum_{mu=1}^{n} 1/mu` in
/// [`ByMode::Global`] and `c = sum_{mu=1}^{k} 1/mu` in
/// [`ByMode::PerFeature`]. The hypotheses of the smallest `k` p-values are
/// rejected for the largest `k` that passes, together with any p-value tied
/// with the `k`-th.
pub fn benjamini_yekutieli(p_values: &[f64], q: f64, mode: ByMode) -> Result<Vec<bool>, SelectionError> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(SelectionError::InvalidQ(q));
    }
    if let Some((index, &value)) = p_values.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
        return Err(SelectionError::InvalidP { index, value });
    }
    let n = p_values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));

    let nf = n as f64;
    let global_c: f64 = (1..=n).map(|mu| 1.0 / mu as f64).sum();
    let mut partial_c = 0.0;
    let mut last_pass: Option<usize> = None;
    for (rank, &idx) in order.iter().enumerate() {
        let k = rank + 1;
        partial_c += 1.0 / k as f64;
        let c = match mode {
            ByMode::Global => global_c,
            ByMode::PerFeature => partial_c,
        };
        if p_values[idx] <= k as f64 * q / (nf * c) {
            last_pass = Some(rank);
        }
    }

    let mut mask = vec![false; n];
    if let Some(last) = last_pass {
        let cutoff = p_values[order[last]];
        for &idx in &order {
            if p_values[idx] > cutoff {
                break;
            }
            mask[idx] = true;
        }
    }
    Ok(mask)
}

/// Combines per-feature test results into a relevance table.
///
/// `outcomes[i]` is `None` for an untestable feature; such features are never
/// relevant and do not count towards the number of hypotheses.
pub fn relevance_from_outcomes(
    matrix: &FeatureMatrix,
    outcomes: &[Option<TestOutcome>],
    q: f64,
    mode: ByMode,
) -> Result<RelevanceTable, SelectionError> {
    let tested: Vec<f64> = outcomes.iter().flatten().map(|o| o.p_value).collect();
    let mask = benjamini_yekutieli(&tested, q, mode)?;
    let mut decisions = mask.into_iter();
    let rows = matrix
        .columns()
        .iter()
        .zip(outcomes)
        .map(|(column, outcome)| match outcome {
            Some(o) => RelevanceRow {
                feature: column.id().clone(),
                p_value: Some(o.p_value),
                test: o.test,
                relevant: decisions.next().unwrap_or(false),
            },
            None => RelevanceRow { feature: column.id().clone(), p_value: None, test: TestKind::None, relevant: false },
        })
        .collect();
    Ok(RelevanceTable::new(rows))
}

/// Tests every column of `matrix` against `target` and applies the
/// Benjamini-Yekutieli procedure at level `config.q`.
pub fn build_relevance_table(
    matrix: &FeatureMatrix,
    target: &TargetVector,
    config: &SelectionConfig,
) -> Result<RelevanceTable, SelectionError> {
    if !(config.q > 0.0 && config.q <= 1.0) {
        return Err(SelectionError::InvalidQ(config.q));
    }
    if matrix.n_columns() > 0 && matrix.n_rows() != target.len() {
        return Err(SelectionError::LengthMismatch { expected: target.len(), found: matrix.n_rows() });
    }
    let outcomes = matrix
        .columns()
        .iter()
        .map(|c| dispatch_test(c, target))
        .collect::<Result<Vec<_>, _>>()?;
    relevance_from_outcomes(matrix, &outcomes, config.q, config.by_mode)
}
