//! Feature significance tests and the rule that picks one per feature.
//!
//! | feature    | target     | test                                    |
//! |------------|------------|-----------------------------------------|
//! | binary     | binary     | Fisher exact                            |
//! | binary     | continuous | KS on the target split by feature value |
//! | continuous | binary     | KS on the feature split by target value |
//! | continuous | continuous | Kendall tau-b                           |
//!
//! Constant features are not testable. All p-values are two-sided.

use alloc::vec::Vec;

use crate::model::{CodomainClass, FeatureColumn, TargetVector};

mod fisher;
mod kendall;
mod ks;

pub use fisher::{fisher_exact, fisher_table, hypergeometric_pmf};
pub use kendall::{kendall_rank, kendall_variance};
pub use ks::{kolmogorov_survival, ks_exact_survival, ks_statistic, ks_two_sample, EXACT_MAX_PRODUCT};

/// Which test produced a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    Fisher,
    /// Binary feature, continuous target.
    KsBinaryFeature,
    /// Continuous feature, binary target.
    KsBinaryTarget,
    Kendall,
    /// The feature was constant and not tested.
    None,
}

impl TestKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestKind::Fisher => "fisher",
            TestKind::KsBinaryFeature => "ks_binary_feature",
            TestKind::KsBinaryTarget => "ks_binary_target",
            TestKind::Kendall => "kendall",
            TestKind::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Fisher, Self::KsBinaryFeature, Self::KsBinaryTarget, Self::Kendall, Self::None]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

impl core::fmt::Display for TestKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub p_value: f64,
    /// Point probability of the observed table (Fisher), `D` (KS) or
    /// `tau_b` (Kendall).
    pub statistic: f64,
    pub test: TestKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TestError {
    #[error("feature has {found} values but the target has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("a KS sample is empty")]
    EmptySample,
    #[error("input is constant")]
    ConstantInput,
    #[error("input has more than two distinct values")]
    NotBinary,
}

/// Runs the test matching the codomains of `feature` and `target`.
///
/// Returns `Ok(None)` for a constant feature.
pub fn dispatch_test(feature: &FeatureColumn, target: &TargetVector) -> Result<Option<TestOutcome>, TestError> {
    dispatch_classified(feature.values(), feature.class(), target.values(), target.class())
}

/// [`dispatch_test`] on raw slices with precomputed codomain classes.
pub fn dispatch_classified(
    x: &[f64],
    x_class: CodomainClass,
    y: &[f64],
    y_class: CodomainClass,
) -> Result<Option<TestOutcome>, TestError> {
    if x.len() != y.len() {
        return Err(TestError::LengthMismatch { expected: y.len(), found: x.len() });
    }
    use CodomainClass::*;
    let outcome = match (x_class, y_class) {
        (Constant, _) | (_, Constant) => return Ok(None),
        (Binary, Binary) => fisher_exact(x, y)?,
        (Binary, Continuous) => {
            let (a, b) = split_by(y, x);
            TestOutcome { test: TestKind::KsBinaryFeature, ..ks_two_sample(&a, &b)? }
        }
        (Continuous, Binary) => {
            let (a, b) = split_by(x, y);
            TestOutcome { test: TestKind::KsBinaryTarget, ..ks_two_sample(&a, &b)? }
        }
        (Continuous, Continuous) => kendall_rank(x, y)?,
    };
    Ok(Some(outcome))
}

/// Splits `values` by whether the matching `labels` entry equals the smaller
/// of the two label values.
fn split_by(values: &[f64], labels: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let low = labels.iter().copied().fold(f64::INFINITY, f64::min);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (&v, &l) in values.iter().zip(labels) {
        if l == low {
            a.push(v);
        } else {
            b.push(v);
        }
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FeatureId;
    use alloc::string::ToString;
    use alloc::vec;

    fn column(values: Vec<f64>) -> FeatureColumn {
        FeatureColumn::new(FeatureId::Other("f".to_string()), values)
    }

    #[test]
    fn dispatch_by_codomain() {
        let binary_target = TargetVector::new(vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        let real_target = TargetVector::new(vec![0.3, 1.2, 0.1, 2.0, -1.0, 0.7]).unwrap();
        let binary = column(vec![1.0, 2.0, 1.0, 2.0, 2.0, 1.0]);
        let real = column(vec![0.5, 0.1, 0.9, 0.4, 0.2, 0.3]);
        let constant = column(vec![3.0; 6]);

        let kind = |f: &FeatureColumn, t: &TargetVector| dispatch_test(f, t).unwrap().map(|o| o.test);
        assert_eq!(kind(&binary, &binary_target), Some(TestKind::Fisher));
        assert_eq!(kind(&binary, &real_target), Some(TestKind::KsBinaryFeature));
        assert_eq!(kind(&real, &binary_target), Some(TestKind::KsBinaryTarget));
        assert_eq!(kind(&real, &real_target), Some(TestKind::Kendall));
        assert_eq!(kind(&constant, &real_target), None);
    }

    #[test]
    fn dispatch_checks_length() {
        let target = TargetVector::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(
            dispatch_test(&column(vec![1.0, 2.0]), &target),
            Err(TestError::LengthMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn feature_equal_to_target_is_highly_significant() {
        let y: Vec<f64> = (0..40).map(|i| (i % 2) as f64).collect();
        let target = TargetVector::new(y.clone()).unwrap();
        let out = dispatch_test(&column(y), &target).unwrap().unwrap();
        assert_eq!(out.test, TestKind::Fisher);
        assert!(out.p_value < 1e-10);
    }

    #[test]
    fn test_kind_names_round_trip() {
        for k in [TestKind::Fisher, TestKind::KsBinaryFeature, TestKind::KsBinaryTarget, TestKind::Kendall, TestKind::None] {
            assert_eq!(TestKind::parse(k.as_str()), Some(k));
        }
    }
}
