//! Catalog of univariate feature mappings.
//!
//! Every mapping takes one series and returns one real value. Mappings are
//! pure: the result depends only on the mapping, its parameters and the
//! series values. Invalid parameters for a given series length and
//! non-finite results are reported through [`FeatureFlag`] and replaced by 0.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::{OnceCell, RefCell};
use num_complex::Complex64;
#[allow(unused_imports)] // Inherent methods take over when std is linked.
use num_traits::Float;

use crate::model::{FeatureId, TimeSeriesSample};

pub mod cwt;
pub mod fft;
pub mod regression;
pub mod summary;
pub mod welch;

/// Why an extracted value was replaced by 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureFlag {
    /// The mapping's parameters do not fit the series length.
    ParamOutOfRange,
    /// A regression design was rank deficient.
    Degenerate,
    /// The formula produced NaN or an infinity.
    NonFinite,
}

/// One extracted value and, if it was replaced, the reason.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extracted {
    pub value: f64,
    pub flag: Option<FeatureFlag>,
}

impl Extracted {
    fn from_result(result: Result<f64, FeatureFlag>) -> Self {
        match result {
            Ok(v) if v.is_finite() => Extracted { value: v, flag: None },
            Ok(_) => Extracted { value: 0.0, flag: Some(FeatureFlag::NonFinite) },
            Err(flag) => Extracted { value: 0.0, flag: Some(flag) },
        }
    }
}

/// Errors building a [`MappingSpec`] from a name and parameter bindings.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("unknown feature mapping `{0}`")]
    UnknownMapping(String),
    #[error("mapping `{mapping}` requires parameter `{param}`")]
    MissingParam { mapping: &'static str, param: &'static str },
    #[error("mapping `{mapping}` does not take parameter `{param}`")]
    UnexpectedParam { mapping: &'static str, param: String },
    #[error("parameter `{param}` of `{mapping}` is invalid: {reason}")]
    InvalidParam { mapping: &'static str, param: &'static str, reason: &'static str },
}

/// A feature mapping together with its parameter bindings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MappingSpec {
    Maximum,
    Minimum,
    Mean,
    Var,
    Std,
    Skewness,
    Kurtosis,
    Length,
    Median,
    /// `inf { z : ECDF(z) >= q }`.
    Quantile { q: f64 },
    AbsoluteEnergy,
    AugmentedDickeyFullerTestStatistic,
    BinnedEntropy { bins: usize },
    HasLargeStandardDeviation,
    HasVarianceLargerThanStd,
    IsSymmetricLooking,
    MassQuantile { q: f64 },
    NumberDataPointsAboveMean,
    NumberDataPointsAboveMedian,
    NumberDataPointsBelowMean,
    NumberDataPointsBelowMedian,
    /// Coefficient `phi_coeff` of an AR(`max_lag`) fit; `phi_0` is the intercept.
    ArimaModelCoefficients { coeff: usize, max_lag: usize },
    /// Ricker transform coefficient at width `width` and location
    /// `floor(position * n)`.
    CwtCoefficients { width: usize, position: f64 },
    /// Real part of DFT coefficient `k` (taken modulo `n`).
    FftCoefficient { k: usize },
    FirstIndexMax,
    FirstIndexMin,
    LaggedAutocorrelation { lag: usize },
    /// 1 when more than `threshold` peaks of support `support` exist.
    LargeNumberOfPeaks { support: usize, threshold: usize },
    LastIndexMax,
    LastIndexMin,
    LongestStrikeAboveMean,
    LongestStrikeAboveMedian,
    LongestStrikeBelowMean,
    LongestStrikeBelowMedian,
    LongestStrikeNegative,
    LongestStrikePositive,
    LongestStrikeZero,
    MeanAbsoluteChange,
    MeanAbsoluteChangeQuantiles { lower: f64, upper: f64 },
    MeanAutocorrelation,
    MeanSecondDerivateCentral,
    /// Ridge-line peak count over Ricker widths `1..=max_width`.
    NumberCwtPeaks { max_width: usize },
    NumberPeaks { support: usize },
    SpektralWelchDensity { index: usize },
    TimeReversalAsymmetryStatistic { lag: usize },
}

/// Mapping names in catalog order.
pub const MAPPING_NAMES: [&str; 45] = [
    "maximum",
    "minimum",
    "mean",
    "var",
    "std",
    "skewness",
    "kurtosis",
    "length",
    "median",
    "quantile",
    "absolute_energy",
    "augmented_dickey_fuller_test_statistic",
    "binned_entropy",
    "has_large_standard_deviation",
    "has_variance_larger_than_std",
    "is_symmetric_looking",
    "mass_quantile",
    "number_data_points_above_mean",
    "number_data_points_above_median",
    "number_data_points_below_mean",
    "number_data_points_below_median",
    "arima_model_coefficients",
    "continuous_wavelet_transformation_coefficients",
    "fast_fourier_transformation_coefficient",
    "first_index_max",
    "first_index_min",
    "lagged_autocorrelation",
    "large_number_of_peaks",
    "last_index_max",
    "last_index_min",
    "longest_strike_above_mean",
    "longest_strike_above_median",
    "longest_strike_below_mean",
    "longest_strike_below_median",
    "longest_strike_negative",
    "longest_strike_positive",
    "longest_strike_zero",
    "mean_absolute_change",
    "mean_absolute_change_quantiles",
    "mean_autocorrelation",
    "mean_second_derivate_central",
    "number_continous_wavelet_transformation_peaks_of_size",
    "number_peaks_of_size",
    "spektral_welch_density",
    "time_reversal_asymmetry_statistic",
];

impl MappingSpec {
    pub fn name(&self) -> &'static str {
        use MappingSpec::*;
        match self {
            Maximum => "maximum",
            Minimum => "minimum",
            Mean => "mean",
            Var => "var",
            Std => "std",
            Skewness => "skewness",
            Kurtosis => "kurtosis",
            Length => "length",
            Median => "median",
            Quantile { .. } => "quantile",
            AbsoluteEnergy => "absolute_energy",
            AugmentedDickeyFullerTestStatistic => "augmented_dickey_fuller_test_statistic",
            BinnedEntropy { .. } => "binned_entropy",
            HasLargeStandardDeviation => "has_large_standard_deviation",
            HasVarianceLargerThanStd => "has_variance_larger_than_std",
            IsSymmetricLooking => "is_symmetric_looking",
            MassQuantile { .. } => "mass_quantile",
            NumberDataPointsAboveMean => "number_data_points_above_mean",
            NumberDataPointsAboveMedian => "number_data_points_above_median",
            NumberDataPointsBelowMean => "number_data_points_below_mean",
            NumberDataPointsBelowMedian => "number_data_points_below_median",
            ArimaModelCoefficients { .. } => "arima_model_coefficients",
            CwtCoefficients { .. } => "continuous_wavelet_transformation_coefficients",
            FftCoefficient { .. } => "fast_fourier_transformation_coefficient",
            FirstIndexMax => "first_index_max",
            FirstIndexMin => "first_index_min",
            LaggedAutocorrelation { .. } => "lagged_autocorrelation",
            LargeNumberOfPeaks { .. } => "large_number_of_peaks",
            LastIndexMax => "last_index_max",
            LastIndexMin => "last_index_min",
            LongestStrikeAboveMean => "longest_strike_above_mean",
            LongestStrikeAboveMedian => "longest_strike_above_median",
            LongestStrikeBelowMean => "longest_strike_below_mean",
            LongestStrikeBelowMedian => "longest_strike_below_median",
            LongestStrikeNegative => "longest_strike_negative",
            LongestStrikePositive => "longest_strike_positive",
            LongestStrikeZero => "longest_strike_zero",
            MeanAbsoluteChange => "mean_absolute_change",
            MeanAbsoluteChangeQuantiles { .. } => "mean_absolute_change_quantiles",
            MeanAutocorrelation => "mean_autocorrelation",
            MeanSecondDerivateCentral => "mean_second_derivate_central",
            NumberCwtPeaks { .. } => "number_continous_wavelet_transformation_peaks_of_size",
            NumberPeaks { .. } => "number_peaks_of_size",
            SpektralWelchDensity { .. } => "spektral_welch_density",
            TimeReversalAsymmetryStatistic { .. } => "time_reversal_asymmetry_statistic",
        }
    }

    /// Position of the mapping in the catalog, used to order registries.
    pub fn catalog_rank(&self) -> usize {
        let name = self.name();
        MAPPING_NAMES.iter().position(|n| *n == name).expect("every mapping is listed")
    }

    /// Parameter bindings in rendering order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        use MappingSpec::*;
        match *self {
            Quantile { q } | MassQuantile { q } => alloc::vec![("q", q)],
            BinnedEntropy { bins } => alloc::vec![("m", bins as f64)],
            ArimaModelCoefficients { coeff, max_lag } => {
                alloc::vec![("i", coeff as f64), ("k", max_lag as f64)]
            }
            CwtCoefficients { width, position } => alloc::vec![("a", width as f64), ("pos", position)],
            FftCoefficient { k } => alloc::vec![("k", k as f64)],
            LaggedAutocorrelation { lag } | TimeReversalAsymmetryStatistic { lag } => {
                alloc::vec![("l", lag as f64)]
            }
            LargeNumberOfPeaks { support, threshold } => {
                alloc::vec![("l", support as f64), ("m", threshold as f64)]
            }
            MeanAbsoluteChangeQuantiles { lower, upper } => alloc::vec![("ql", lower), ("qh", upper)],
            NumberCwtPeaks { max_width } => alloc::vec![("l", max_width as f64)],
            NumberPeaks { support } => alloc::vec![("l", support as f64)],
            SpektralWelchDensity { index } => alloc::vec![("i", index as f64)],
            _ => Vec::new(),
        }
    }

    /// Every catalog mapping yields one value per series.
    pub fn output_arity(&self) -> usize {
        1
    }

    /// Column identity of this mapping applied to series of `kind`.
    pub fn feature_id(&self, kind: &str) -> FeatureId {
        FeatureId::Series {
            kind: kind.to_string(),
            mapping: self.name().to_string(),
            params: self.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    /// Builds a spec from a mapping name and named parameter values.
    pub fn from_parts(name: &str, params: &[(&str, f64)]) -> Result<Self, SpecError> {
        use MappingSpec::*;
        let mapping: &'static str = MAPPING_NAMES
            .iter()
            .find(|n| **n == name)
            .copied()
            .ok_or_else(|| SpecError::UnknownMapping(name.to_string()))?;
        let p = Params { mapping, params };
        let spec = match mapping {
            "maximum" => Maximum,
            "minimum" => Minimum,
            "mean" => Mean,
            "var" => Var,
            "std" => Std,
            "skewness" => Skewness,
            "kurtosis" => Kurtosis,
            "length" => Length,
            "median" => Median,
            "quantile" => Quantile { q: p.fraction("q", true)? },
            "absolute_energy" => AbsoluteEnergy,
            "augmented_dickey_fuller_test_statistic" => AugmentedDickeyFullerTestStatistic,
            "binned_entropy" => BinnedEntropy { bins: p.count("m", 1)? },
            "has_large_standard_deviation" => HasLargeStandardDeviation,
            "has_variance_larger_than_std" => HasVarianceLargerThanStd,
            "is_symmetric_looking" => IsSymmetricLooking,
            "mass_quantile" => MassQuantile { q: p.fraction("q", true)? },
            "number_data_points_above_mean" => NumberDataPointsAboveMean,
            "number_data_points_above_median" => NumberDataPointsAboveMedian,
            "number_data_points_below_mean" => NumberDataPointsBelowMean,
            "number_data_points_below_median" => NumberDataPointsBelowMedian,
            "arima_model_coefficients" => {
                let coeff = p.count("i", 0)?;
                let max_lag = p.count("k", 1)?;
                if coeff > max_lag {
                    return Err(SpecError::InvalidParam { mapping, param: "i", reason: "must not exceed k" });
                }
                ArimaModelCoefficients { coeff, max_lag }
            }
            "continuous_wavelet_transformation_coefficients" => CwtCoefficients {
                width: p.count("a", 1)?,
                position: p.fraction("pos", false)?,
            },
            "fast_fourier_transformation_coefficient" => FftCoefficient { k: p.count("k", 0)? },
            "first_index_max" => FirstIndexMax,
            "first_index_min" => FirstIndexMin,
            "lagged_autocorrelation" => LaggedAutocorrelation { lag: p.count("l", 1)? },
            "large_number_of_peaks" => LargeNumberOfPeaks {
                support: p.count("l", 1)?,
                threshold: p.count("m", 0)?,
            },
            "last_index_max" => LastIndexMax,
            "last_index_min" => LastIndexMin,
            "longest_strike_above_mean" => LongestStrikeAboveMean,
            "longest_strike_above_median" => LongestStrikeAboveMedian,
            "longest_strike_below_mean" => LongestStrikeBelowMean,
            "longest_strike_below_median" => LongestStrikeBelowMedian,
            "longest_strike_negative" => LongestStrikeNegative,
            "longest_strike_positive" => LongestStrikePositive,
            "longest_strike_zero" => LongestStrikeZero,
            "mean_absolute_change" => MeanAbsoluteChange,
            "mean_absolute_change_quantiles" => {
                let lower = p.fraction("ql", true)?;
                let upper = p.fraction("qh", true)?;
                if lower >= upper {
                    return Err(SpecError::InvalidParam { mapping, param: "ql", reason: "must be below qh" });
                }
                MeanAbsoluteChangeQuantiles { lower, upper }
            }
            "mean_autocorrelation" => MeanAutocorrelation,
            "mean_second_derivate_central" => MeanSecondDerivateCentral,
            "number_continous_wavelet_transformation_peaks_of_size" => {
                NumberCwtPeaks { max_width: p.count("l", 1)? }
            }
            "number_peaks_of_size" => NumberPeaks { support: p.count("l", 1)? },
            "spektral_welch_density" => SpektralWelchDensity { index: p.count("i", 0)? },
            "time_reversal_asymmetry_statistic" => TimeReversalAsymmetryStatistic { lag: p.count("l", 1)? },
            _ => unreachable!("name list and match are kept in sync"),
        };
        p.reject_unknown(&spec)?;
        Ok(spec)
    }
}

struct Params<'a> {
    mapping: &'static str,
    params: &'a [(&'a str, f64)],
}

impl Params<'_> {
    fn get(&self, param: &'static str) -> Result<f64, SpecError> {
        self.params
            .iter()
            .find(|(k, _)| *k == param)
            .map(|(_, v)| *v)
            .ok_or(SpecError::MissingParam { mapping: self.mapping, param })
    }

    fn count(&self, param: &'static str, min: usize) -> Result<usize, SpecError> {
        let v = self.get(param)?;
        if !(v.is_finite() && v.fract() == 0.0 && v >= min as f64 && v < 1e9) {
            let reason = if min == 0 { "must be a non-negative integer" } else { "must be a positive integer" };
            return Err(SpecError::InvalidParam { mapping: self.mapping, param, reason });
        }
        Ok(v as usize)
    }

    /// `[0, 1]` when `inclusive_one`, else `[0, 1)`.
    fn fraction(&self, param: &'static str, inclusive_one: bool) -> Result<f64, SpecError> {
        let v = self.get(param)?;
        let ok = v >= 0.0 && if inclusive_one { v <= 1.0 } else { v < 1.0 };
        if !ok {
            return Err(SpecError::InvalidParam { mapping: self.mapping, param, reason: "out of range" });
        }
        Ok(v)
    }

    fn reject_unknown(&self, spec: &MappingSpec) -> Result<(), SpecError> {
        let known = spec.params();
        for (k, _) in self.params {
            if !known.iter().any(|(name, _)| name == k) {
                return Err(SpecError::UnexpectedParam { mapping: self.mapping, param: k.to_string() });
            }
        }
        Ok(())
    }
}

/// An ordered list of mapping specs applied to every series kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    specs: Vec<MappingSpec>,
}

impl Registry {
    pub fn new(specs: Vec<MappingSpec>) -> Self {
        Self { specs }
    }

    /// Sorts specs into catalog order, keeping the given order within a
    /// mapping.
    pub fn in_catalog_order(mut specs: Vec<MappingSpec>) -> Self {
        specs.sort_by_key(MappingSpec::catalog_rank);
        Self { specs }
    }

    pub fn specs(&self) -> &[MappingSpec] {
        &self.specs
    }

    /// Number of feature columns produced per series kind.
    pub fn columns_per_kind(&self) -> usize {
        self.specs.iter().map(MappingSpec::output_arity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }
}

fn tenths() -> impl Iterator<Item = f64> {
    (1..=9).map(|i| i as f64 / 10.0)
}

/// The default registry: 111 columns per series kind.
pub fn registry() -> Registry {
    use MappingSpec::*;
    let mut specs = alloc::vec![Maximum, Minimum, Mean, Var, Std, Skewness, Kurtosis, Length, Median];
    specs.extend(tenths().map(|q| Quantile { q }));
    specs.extend([AbsoluteEnergy, AugmentedDickeyFullerTestStatistic]);
    specs.extend([5, 10, 100].map(|bins| BinnedEntropy { bins }));
    specs.extend([HasLargeStandardDeviation, HasVarianceLargerThanStd, IsSymmetricLooking]);
    specs.extend(tenths().map(|q| MassQuantile { q }));
    specs.extend([
        NumberDataPointsAboveMean,
        NumberDataPointsAboveMedian,
        NumberDataPointsBelowMean,
        NumberDataPointsBelowMedian,
    ]);
    specs.extend((0..5).map(|coeff| ArimaModelCoefficients { coeff, max_lag: 10 }));
    for width in [2, 5, 10, 20] {
        specs.extend([0.0, 0.25, 0.5].map(|position| CwtCoefficients { width, position }));
    }
    specs.extend((0..15).map(|k| FftCoefficient { k }));
    specs.extend([FirstIndexMax, FirstIndexMin]);
    specs.extend((1..=9).map(|lag| LaggedAutocorrelation { lag }));
    specs.extend([1, 3, 5].map(|support| LargeNumberOfPeaks { support, threshold: 5 }));
    specs.extend([
        LastIndexMax,
        LastIndexMin,
        LongestStrikeAboveMean,
        LongestStrikeAboveMedian,
        LongestStrikeBelowMean,
        LongestStrikeBelowMedian,
        LongestStrikeNegative,
        LongestStrikePositive,
        LongestStrikeZero,
        MeanAbsoluteChange,
    ]);
    specs.extend(
        [(0.2, 0.8), (0.1, 0.9), (0.25, 0.75)].map(|(lower, upper)| MeanAbsoluteChangeQuantiles { lower, upper }),
    );
    specs.extend([MeanAutocorrelation, MeanSecondDerivateCentral]);
    specs.extend([5, 10].map(|max_width| NumberCwtPeaks { max_width }));
    specs.extend([1, 3, 5].map(|support| NumberPeaks { support }));
    specs.extend([2, 5, 8].map(|index| SpektralWelchDensity { index }));
    specs.extend([1, 2, 3].map(|lag| TimeReversalAsymmetryStatistic { lag }));
    Registry { specs }
}

/// Lazily computed quantities shared by the mappings of one series.
struct SeriesContext<'a> {
    values: &'a [f64],
    mean: OnceCell<f64>,
    var: OnceCell<f64>,
    sorted: OnceCell<Vec<f64>>,
    spectrum: OnceCell<Vec<Complex64>>,
    cwt_rows: RefCell<Vec<Vec<f64>>>,
    ar_fits: RefCell<BTreeMap<usize, Option<Vec<f64>>>>,
}

impl<'a> SeriesContext<'a> {
    fn new(values: &'a [f64]) -> Self {
        Self {
            values,
            mean: OnceCell::new(),
            var: OnceCell::new(),
            sorted: OnceCell::new(),
            spectrum: OnceCell::new(),
            cwt_rows: RefCell::new(Vec::new()),
            ar_fits: RefCell::new(BTreeMap::new()),
        }
    }

    fn n(&self) -> usize {
        self.values.len()
    }

    fn mean(&self) -> f64 {
        *self.mean.get_or_init(|| summary::mean(self.values))
    }

    fn var(&self) -> f64 {
        *self.var.get_or_init(|| summary::variance(self.values, self.mean()))
    }

    fn std(&self) -> f64 {
        self.var().sqrt()
    }

    fn sorted(&self) -> &[f64] {
        self.sorted.get_or_init(|| {
            let mut v = self.values.to_vec();
            v.sort_by(f64::total_cmp);
            v
        })
    }

    fn min(&self) -> f64 {
        self.sorted()[0]
    }

    fn max(&self) -> f64 {
        self.sorted()[self.n() - 1]
    }

    fn median(&self) -> f64 {
        summary::median(self.sorted())
    }

    fn quantile(&self, q: f64) -> f64 {
        summary::ecdf_quantile(self.sorted(), q)
    }

    fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| fft::fft_real(self.values))
    }

    fn ar_coefficient(&self, coeff: usize, max_lag: usize) -> Result<f64, FeatureFlag> {
        if max_lag >= self.n() || self.n() - max_lag < max_lag + 1 {
            return Err(FeatureFlag::ParamOutOfRange);
        }
        let mut fits = self.ar_fits.borrow_mut();
        let fit = fits
            .entry(max_lag)
            .or_insert_with(|| regression::ar_coefficients(self.values, max_lag));
        fit.as_ref().map(|phi| phi[coeff]).ok_or(FeatureFlag::Degenerate)
    }

    fn cwt_peaks(&self, max_width: usize) -> usize {
        let mut rows = self.cwt_rows.borrow_mut();
        while rows.len() < max_width {
            let a = rows.len() + 1;
            rows.push(cwt::row(self.values, a));
        }
        cwt::count_ridge_peaks(&rows[..max_width])
    }

    fn evaluate(&self, spec: &MappingSpec) -> Result<f64, FeatureFlag> {
        use MappingSpec::*;
        let v = self.values;
        let n = self.n();
        let indicator = |b: bool| if b { 1.0 } else { 0.0 };
        let value = match *spec {
            Maximum => self.max(),
            Minimum => self.min(),
            Mean => self.mean(),
            Var => self.var(),
            Std => self.std(),
            Skewness => summary::skewness(v, self.mean()),
            Kurtosis => summary::kurtosis(v, self.mean(), self.std()),
            Length => n as f64,
            Median => self.median(),
            Quantile { q } => self.quantile(q),
            AbsoluteEnergy => v.iter().map(|s| s * s).sum(),
            AugmentedDickeyFullerTestStatistic => {
                let p = regression::adf_lag_order(n);
                if n < 2 || n - 1 - p <= p + 2 {
                    return Err(FeatureFlag::ParamOutOfRange);
                }
                regression::adf_statistic(v).ok_or(FeatureFlag::Degenerate)?
            }
            BinnedEntropy { bins } => summary::binned_entropy(v, self.min(), self.max(), bins),
            HasLargeStandardDeviation => indicator(self.std() > (self.max() - self.min()) / 2.0),
            HasVarianceLargerThanStd => indicator(self.var() > self.std()),
            IsSymmetricLooking => {
                indicator((self.mean() - self.median()).abs() < (self.max() - self.min()) / 2.0)
            }
            MassQuantile { q } => summary::mass_quantile(v, self.mean(), q),
            NumberDataPointsAboveMean => {
                let m = self.mean();
                summary::count_where(v, |s| s > m)
            }
            NumberDataPointsAboveMedian => {
                let m = self.median();
                summary::count_where(v, |s| s > m)
            }
            NumberDataPointsBelowMean => {
                let m = self.mean();
                summary::count_where(v, |s| s < m)
            }
            NumberDataPointsBelowMedian => {
                let m = self.median();
                summary::count_where(v, |s| s < m)
            }
            ArimaModelCoefficients { coeff, max_lag } => self.ar_coefficient(coeff, max_lag)?,
            CwtCoefficients { width, position } => {
                let b = (position * n as f64).floor();
                cwt::coefficient(v, width as f64, b)
            }
            FftCoefficient { k } => self.spectrum()[k % n].re,
            FirstIndexMax => summary::relative_extreme_index(v, false, |a, b| a > b),
            FirstIndexMin => summary::relative_extreme_index(v, false, |a, b| a < b),
            LastIndexMax => summary::relative_extreme_index(v, true, |a, b| a > b),
            LastIndexMin => summary::relative_extreme_index(v, true, |a, b| a < b),
            LaggedAutocorrelation { lag } => {
                if lag >= n {
                    return Err(FeatureFlag::ParamOutOfRange);
                }
                summary::lagged_autocorrelation(v, self.mean(), self.var(), lag)
            }
            LargeNumberOfPeaks { support, threshold } => {
                indicator(summary::number_peaks(v, support) > threshold)
            }
            LongestStrikeAboveMean => {
                let m = self.mean();
                summary::longest_strike(v, |s| s >= m)
            }
            LongestStrikeAboveMedian => {
                let m = self.median();
                summary::longest_strike(v, |s| s >= m)
            }
            LongestStrikeBelowMean => {
                let m = self.mean();
                summary::longest_strike(v, |s| s <= m)
            }
            LongestStrikeBelowMedian => {
                let m = self.median();
                summary::longest_strike(v, |s| s <= m)
            }
            LongestStrikeNegative => summary::longest_strike(v, |s| s < 0.0),
            LongestStrikePositive => summary::longest_strike(v, |s| s > 0.0),
            LongestStrikeZero => summary::longest_strike(v, |s| s == 0.0),
            MeanAbsoluteChange => summary::mean_absolute_change(v),
            MeanAbsoluteChangeQuantiles { lower, upper } => {
                summary::mean_absolute_change_in_corridor(v, self.quantile(lower), self.quantile(upper))
            }
            MeanAutocorrelation => summary::mean_autocorrelation(v, self.mean()),
            MeanSecondDerivateCentral => {
                if n < 3 {
                    return Err(FeatureFlag::ParamOutOfRange);
                }
                summary::mean_second_derivative_central(v)
            }
            NumberCwtPeaks { max_width } => self.cwt_peaks(max_width) as f64,
            NumberPeaks { support } => summary::number_peaks(v, support) as f64,
            SpektralWelchDensity { index } => welch::density_at(v, index).ok_or(FeatureFlag::ParamOutOfRange)?,
            TimeReversalAsymmetryStatistic { lag } => {
                if 2 * lag >= n {
                    return Err(FeatureFlag::ParamOutOfRange);
                }
                summary::time_reversal_asymmetry(v, lag)
            }
        };
        Ok(value)
    }
}

/// Applies one mapping to one series.
pub fn extract_feature(spec: &MappingSpec, series: &TimeSeriesSample) -> Extracted {
    Extracted::from_result(SeriesContext::new(series.values()).evaluate(spec))
}

/// Applies every spec to the same series, sharing intermediate results
/// (sorted values, spectrum, transform rows, AR fits) between mappings.
///
/// Values must be non-empty; output order follows `specs`.
pub fn extract_series(specs: &[MappingSpec], values: &[f64]) -> Vec<Extracted> {
    if values.is_empty() {
        return specs.iter().map(|_| Extracted::from_result(Err(FeatureFlag::ParamOutOfRange))).collect();
    }
    let ctx = SeriesContext::new(values);
    specs.iter().map(|spec| Extracted::from_result(ctx.evaluate(spec))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use MappingSpec::*;

    fn eval(spec: MappingSpec, values: &[f64]) -> Extracted {
        extract_feature(&spec, &TimeSeriesSample::new("e", "s", values.to_vec()).unwrap())
    }

    #[test]
    fn default_registry_has_111_columns() {
        let r = registry();
        assert_eq!(r.columns_per_kind(), 111);
        assert_eq!(r, registry());
        let mut sorted = r.specs().to_vec();
        sorted.sort_by_key(MappingSpec::catalog_rank);
        assert_eq!(sorted, r.specs());
    }

    #[test]
    fn every_catalog_name_is_in_the_default_registry() {
        let r = registry();
        for name in MAPPING_NAMES {
            assert!(r.specs().iter().any(|s| s.name() == name), "{name}");
        }
    }

    #[test]
    fn specs_round_trip_through_parts() {
        for spec in registry().specs() {
            let params = spec.params();
            assert_eq!(MappingSpec::from_parts(spec.name(), &params).as_ref(), Ok(spec));
        }
        assert!(matches!(MappingSpec::from_parts("nope", &[]), Err(SpecError::UnknownMapping(_))));
        assert!(matches!(
            MappingSpec::from_parts("quantile", &[]),
            Err(SpecError::MissingParam { param: "q", .. })
        ));
        assert!(matches!(
            MappingSpec::from_parts("quantile", &[("q", 1.5)]),
            Err(SpecError::InvalidParam { .. })
        ));
        assert!(matches!(
            MappingSpec::from_parts("mean", &[("q", 0.5)]),
            Err(SpecError::UnexpectedParam { .. })
        ));
        assert!(matches!(
            MappingSpec::from_parts("number_peaks_of_size", &[("l", 1.5)]),
            Err(SpecError::InvalidParam { .. })
        ));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(eval(Mean, &[1.0, 2.0, 3.0, 4.0]).value, 2.5);
        assert_eq!(eval(AbsoluteEnergy, &[1.0, 2.0, 2.0]).value, 9.0);
        assert_eq!(eval(Maximum, &[-1.0, 0.0, 5.0]).value, 5.0);
        assert_eq!(eval(FftCoefficient { k: 0 }, &[1.0, 1.0, 1.0, 1.0]).value, 4.0);
        assert_eq!(eval(NumberPeaks { support: 1 }, &[0.0, 5.0, 0.0, 5.0, 0.0]).value, 2.0);
        assert_eq!(eval(LaggedAutocorrelation { lag: 1 }, &[1.0, 2.0, 3.0, 4.0, 5.0]).value, 2.0);
        assert_eq!(eval(Length, &[3.0; 7]).value, 7.0);
    }

    #[test]
    fn feature_names() {
        assert_eq!(Mean.feature_id("s1").to_string(), "s1__mean");
        assert_eq!(Quantile { q: 0.3 }.feature_id("s1").to_string(), "s1__quantile__q-0.3");
        assert_eq!(
            ArimaModelCoefficients { coeff: 2, max_lag: 10 }.feature_id("x").to_string(),
            "x__arima_model_coefficients__i-2__k-10"
        );
    }

    #[test]
    fn out_of_range_params_are_flagged_zero() {
        let short = [1.0, 2.0, 4.0, 3.0];
        for spec in [
            LaggedAutocorrelation { lag: 4 },
            ArimaModelCoefficients { coeff: 0, max_lag: 10 },
            TimeReversalAsymmetryStatistic { lag: 2 },
            SpektralWelchDensity { index: 8 },
            AugmentedDickeyFullerTestStatistic,
        ] {
            let e = eval(spec, &short);
            assert_eq!(e, Extracted { value: 0.0, flag: Some(FeatureFlag::ParamOutOfRange) }, "{spec:?}");
        }
    }

    #[test]
    fn non_finite_results_are_flagged_zero() {
        let constant = [2.0; 10];
        for spec in [Skewness, Kurtosis, LaggedAutocorrelation { lag: 1 }, MeanAutocorrelation] {
            assert_eq!(eval(spec, &constant), Extracted { value: 0.0, flag: Some(FeatureFlag::NonFinite) });
        }
        assert_eq!(eval(ArimaModelCoefficients { coeff: 1, max_lag: 2 }, &constant).flag, Some(FeatureFlag::Degenerate));
        assert_eq!(eval(BinnedEntropy { bins: 10 }, &constant), Extracted { value: 0.0, flag: None });
    }

    #[test]
    fn booleans() {
        let v = [0.0, 0.0, 0.0, 10.0];
        // std = sqrt(18.75) ~ 4.33 < 5.
        assert_eq!(eval(HasLargeStandardDeviation, &v).value, 0.0);
        assert_eq!(eval(HasVarianceLargerThanStd, &v).value, 1.0);
        // |2.5 - 0| < 5.
        assert_eq!(eval(IsSymmetricLooking, &v).value, 1.0);
        assert_eq!(eval(LargeNumberOfPeaks { support: 1, threshold: 1 }, &[0.0, 5.0, 0.0, 5.0, 0.0]).value, 1.0);
        assert_eq!(eval(LargeNumberOfPeaks { support: 1, threshold: 2 }, &[0.0, 5.0, 0.0, 5.0, 0.0]).value, 0.0);
    }

    #[test]
    fn strikes_by_sign() {
        let v = [-1.0, -2.0, 0.0, 0.0, 0.0, 3.0, -1.0];
        assert_eq!(eval(LongestStrikeNegative, &v).value, 2.0);
        assert_eq!(eval(LongestStrikeZero, &v).value, 3.0);
        assert_eq!(eval(LongestStrikePositive, &v).value, 1.0);
    }

    #[test]
    fn shared_context_matches_single_evaluation() {
        let values: Vec<f64> = (0..50).map(|i| ((i * 37) % 17) as f64 * 0.3 - 2.0).collect();
        let specs = registry();
        let batch = extract_series(specs.specs(), &values);
        let series = TimeSeriesSample::new("e", "s", values.clone()).unwrap();
        for (spec, got) in specs.specs().iter().zip(&batch) {
            let single = extract_feature(spec, &series);
            assert_eq!(single.value.to_bits(), got.value.to_bits(), "{spec:?}");
            assert_eq!(single.flag, got.flag);
        }
    }

    #[test]
    fn user_grid_with_single_quantile() {
        let r = Registry::in_catalog_order(vec![Quantile { q: 0.5 }]);
        assert_eq!(r.columns_per_kind(), 1);
    }
}
