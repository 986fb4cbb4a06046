//! Correlation PCA on a feature matrix.

#[allow(unused_imports)] // Inherent methods take over when std is linked.
use num_traits::Float;
use alloc::vec::Vec;

use crate::linalg::jacobi_svd;
use crate::model::{CodomainClass, FeatureColumn, FeatureId, FeatureMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PcaError {
    #[error("PCA needs at least 2 rows, found {0}")]
    TooFewRows(usize),
    #[error("every feature column is constant")]
    EmptyAfterConstantDrop,
    #[error("variance fraction {0} is outside (0, 1]")]
    InvalidFraction(f64),
    #[error("singular value decomposition did not converge")]
    NoConvergence,
}

/// Relative tolerance under which loading magnitudes are treated as equal
/// by the sign rule.
pub const LEAD_TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    /// Scores of the retained components, named `pc-1`, `pc-2`, ...
    pub matrix: FeatureMatrix,
    /// Eigenvalues of the sample correlation matrix, descending, one per
    /// singular value of the standardized data.
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// Unit-norm loading vectors of the retained components over the
    /// non-constant input columns.
    pub loadings: Vec<Vec<f64>>,
    /// Input columns that entered the decomposition.
    pub used_columns: Vec<FeatureId>,
}

/// Standardizes the non-constant columns, diagonalizes their correlation
/// structure and keeps the smallest leading set of components whose
/// eigenvalues reach `variance_fraction` of the total.
///
/// Each component is signed so that its largest-magnitude loading (first one
/// on ties, see [`LEAD_TIE`]) is positive.
pub fn pca_reduce(matrix: &FeatureMatrix, variance_fraction: f64) -> Result<PcaResult, PcaError> {
    if !(variance_fraction > 0.0 && variance_fraction <= 1.0) {
        return Err(PcaError::InvalidFraction(variance_fraction));
    }
    let m = matrix.n_rows();
    if m < 2 {
        return Err(PcaError::TooFewRows(m));
    }
    let kept: Vec<&FeatureColumn> =
        matrix.columns().iter().filter(|c| c.class() != CodomainClass::Constant).collect();
    if kept.is_empty() {
        return Err(PcaError::EmptyAfterConstantDrop);
    }
    let k = kept.len();
    let mf = m as f64;
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(k);
    for column in &kept {
        let v = column.values();
        let mean = v.iter().sum::<f64>() / mf;
        let sd = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (mf - 1.0)).sqrt();
        z.push(v.iter().map(|x| (x - mean) / sd).collect());
    }

    // Component j has scores Z v_j (length m) and loadings v_j (length k).
    // With more columns than rows the transpose is decomposed, which swaps
    // the two roles.
    let (singular, scores, axes): (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) = if k <= m {
        let svd = jacobi_svd(z).ok_or(PcaError::NoConvergence)?;
        (svd.singular_values, svd.scaled_left, svd.right)
    } else {
        let rows: Vec<Vec<f64>> = (0..m).map(|i| z.iter().map(|col| col[i]).collect()).collect();
        let svd = jacobi_svd(rows).ok_or(PcaError::NoConvergence)?;
        let scores = svd.right.iter().zip(&svd.singular_values).map(|(u, s)| u.iter().map(|x| x * s).collect()).collect();
        let axes = svd
            .scaled_left
            .iter()
            .zip(&svd.singular_values)
            .map(|(w, &s)| if s > 0.0 { w.iter().map(|x| x / s).collect() } else { w.clone() })
            .collect();
        (svd.singular_values, scores, axes)
    };
    let eigenvalues: Vec<f64> = singular.iter().map(|s| s * s / (mf - 1.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    let explained_variance_ratio: Vec<f64> = eigenvalues.iter().map(|l| l / total).collect();

    let tolerance = eigenvalues[0] * (m.max(k) as f64) * f64::EPSILON;
    let rank = eigenvalues.iter().filter(|&&l| l > tolerance).count().max(1);
    let target = variance_fraction * total * (1.0 - 1e-12);
    let mut retained = rank;
    let mut cumulative = 0.0;
    for (r, l) in eigenvalues.iter().enumerate().take(rank) {
        cumulative += l;
        if cumulative >= target {
            retained = r + 1;
            break;
        }
    }

    let mut columns = Vec::with_capacity(retained);
    let mut loadings = Vec::with_capacity(retained);
    for (c, (axis, score)) in axes.iter().zip(&scores).take(retained).enumerate() {
        // Magnitudes within a relative LEAD_TIE of the largest count as tied,
        // so rounding noise cannot pick the lead (two columns always tie).
        let largest = axis.iter().fold(0.0f64, |acc, w| acc.max(w.abs()));
        let lead = axis.iter().position(|w| w.abs() >= largest * (1.0 - LEAD_TIE)).unwrap_or(0);
        let sign = if axis[lead] < 0.0 { -1.0 } else { 1.0 };
        loadings.push(axis.iter().map(|w| w * sign).collect());
        columns.push(FeatureColumn::new(FeatureId::Component(c + 1), score.iter().map(|x| x * sign).collect()));
    }
    let matrix = FeatureMatrix::new(matrix.entity_order().to_vec(), columns)
        .expect("component names are unique and lengths match");
    Ok(PcaResult {
        matrix,
        eigenvalues,
        explained_variance_ratio,
        loadings,
        used_columns: kept.iter().map(|c| c.id().clone()).collect(),
    })
}
