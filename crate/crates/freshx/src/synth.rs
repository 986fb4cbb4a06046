//! Synthetic datasets and the statistical and timing experiments built on
//! them.
//!
//! All randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`, so
//! every generator is a pure function of its arguments on every platform.

use std::time::Instant;

use freshx_core::features::registry;
use freshx_core::stats::dispatch_classified;
use freshx_core::{
    benjamini_yekutieli, classify_codomain, ByMode, Dataset, DatasetBuilder, FeatureColumn, FeatureId, FeatureMatrix,
    TargetVector, TimeSeriesSample,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::pipeline::{build_relevance_table_par, extract_all, PipelineError};

/// AR(1) coefficient of the generated series.
pub const AR_COEFFICIENT: f64 = 0.5;
/// Kind whose level differs between the classes.
pub const INFORMATIVE_KIND: &str = "informative";
/// Kind with the same distribution in both classes.
pub const NOISE_KIND: &str = "noise";

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid size: {0}")]
    InvalidSize(&'static str),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

fn entity_name(i: usize) -> String {
    format!("e{i:05}")
}

fn ar1(rng: &mut ChaCha8Rng, len: usize, shift: f64) -> Vec<f64> {
    let mut values = Vec::with_capacity(len);
    // Start from the stationary distribution.
    let mut s: f64 = rng.sample::<f64, _>(StandardNormal) / (1.0 - AR_COEFFICIENT * AR_COEFFICIENT).sqrt();
    for _ in 0..len {
        values.push(s + shift);
        s = AR_COEFFICIENT * s + rng.sample::<f64, _>(StandardNormal);
    }
    values
}

/// Two-class dataset with an informative and a noise kind.
///
/// Entities alternate between class 0 and 1. Every series is a stationary
/// AR(1) process with standard normal innovations; class-1 series of the
/// informative kind are shifted by `delta`.
pub fn gen_two_class(m: usize, n_t: usize, delta: f64, seed: u64) -> Result<(Dataset, TargetVector), SynthError> {
    if !m.is_multiple_of(2) {
        return Err(SynthError::InvalidSize("entity count must be even and at least 2"));
    }
    gen_classes(m, n_t, 2, delta, seed)
}

/// Name of kind `k` in [`gen_classes`] output.
pub fn kind_name(k: usize) -> String {
    match k {
        0 => INFORMATIVE_KIND.to_string(),
        1 => NOISE_KIND.to_string(),
        _ => format!("{NOISE_KIND}-{k}"),
    }
}

/// Like [`gen_two_class`] with `kinds` kinds: the first is informative, the
/// rest are noise. With `kinds == 2` the output equals `gen_two_class`.
pub fn gen_classes(
    m: usize,
    n_t: usize,
    kinds: usize,
    delta: f64,
    seed: u64,
) -> Result<(Dataset, TargetVector), SynthError> {
    if m < 2 {
        return Err(SynthError::InvalidSize("entity count must be even and at least 2"));
    }
    if n_t < 8 {
        return Err(SynthError::InvalidSize("series length must be at least 8"));
    }
    if kinds == 0 {
        return Err(SynthError::InvalidSize("at least one kind is needed"));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(SynthError::InvalidSize("shift must be finite and non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = DatasetBuilder::new();
    let mut target = Vec::with_capacity(m);
    for i in 0..m {
        let class = (i % 2) as f64;
        let entity = entity_name(i);
        for k in 0..kinds {
            let shift = if k == 0 { class * delta } else { 0.0 };
            let values = ar1(&mut rng, n_t, shift);
            let sample = TimeSeriesSample::new(entity.clone(), kind_name(k), values).expect("generated values are finite");
            builder.push(sample).expect("each (entity, kind) is pushed once");
        }
        target.push(class);
    }
    let dataset = builder.build().expect("all series have equal length");
    let target = TargetVector::new(target).expect("both classes are present");
    Ok((dataset, target))
}

/// A non-constant Bernoulli(1/2) target.
pub fn random_binary_target(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let y: Vec<f64> = (0..m).map(|_| f64::from(u8::from(rng.random_bool(0.5)))).collect();
        if classify_codomain(&y) == freshx_core::CodomainClass::Binary {
            return y;
        }
    }
}

/// How the noise features of a FER repetition relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FerDesign {
    /// Every feature is drawn independently.
    Independent,
    /// Features come in identical pairs.
    Duplicated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FerReport {
    /// Mean over repetitions of irrelevant-selected / selected (0 when
    /// nothing is selected).
    pub mean: f64,
    pub standard_error: f64,
    pub per_repetition: Vec<f64>,
    pub selected: Vec<usize>,
}

/// Empirical false extraction rate on pure-noise features.
///
/// Each repetition draws `n_features` standard normal features and a random
/// binary target over `m` entities, tests every feature and applies the
/// Benjamini-Yekutieli procedure at level `q`.
pub fn fer_experiment(
    n_features: usize,
    m: usize,
    q: f64,
    repetitions: usize,
    seed: u64,
    design: FerDesign,
    mode: ByMode,
) -> Result<FerReport, SynthError> {
    if n_features == 0 || m < 2 || repetitions == 0 {
        return Err(SynthError::InvalidSize("feature count, entity count and repetitions must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_repetition = Vec::with_capacity(repetitions);
    let mut selected = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let y = random_binary_target(&mut rng, m);
        let y_class = classify_codomain(&y);
        let distinct = match design {
            FerDesign::Independent => n_features,
            FerDesign::Duplicated => n_features.div_ceil(2),
        };
        let mut p_values = Vec::with_capacity(n_features);
        for f in 0..distinct {
            let x: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            let outcome = dispatch_classified(&x, classify_codomain(&x), &y, y_class)
                .expect("lengths match")
                .expect("normal draws are not constant");
            let copies = if design == FerDesign::Duplicated && 2 * f + 1 < n_features { 2 } else { 1 };
            for _ in 0..copies {
                p_values.push(outcome.p_value);
            }
        }
        let mask = benjamini_yekutieli(&p_values, q, mode).map_err(PipelineError::from)?;
        let n_selected = mask.iter().filter(|&&r| r).count();
        // Every feature is irrelevant, so each selection is a false one.
        per_repetition.push(if n_selected == 0 { 0.0 } else { 1.0 });
        selected.push(n_selected);
    }
    let r = repetitions as f64;
    let mean = per_repetition.iter().sum::<f64>() / r;
    let var = if repetitions > 1 {
        per_repetition.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0)
    } else {
        0.0
    };
    Ok(FerReport { mean, standard_error: (var / r).sqrt(), per_repetition, selected })
}

/// Which size is doubled in a scaling run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingAxis {
    /// Series length, with `fixed` entities; times extraction.
    Length,
    /// Entity count, with series of length `fixed`; times extraction.
    Samples,
    /// Feature column count, with `fixed` entities; times testing and
    /// selection.
    Features,
}

impl ScalingAxis {
    pub fn name(&self) -> &'static str {
        match self {
            ScalingAxis::Length => "length",
            ScalingAxis::Samples => "samples",
            ScalingAxis::Features => "features",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub value: usize,
    /// Fastest of the repeated runs.
    pub seconds: f64,
}

/// Random `m x n_features` standard normal feature matrix.
pub fn noise_matrix(rng: &mut ChaCha8Rng, m: usize, n_features: usize) -> FeatureMatrix {
    let columns = (0..n_features)
        .map(|j| {
            let values = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            FeatureColumn::new(FeatureId::Other(format!("x{j}")), values)
        })
        .collect();
    FeatureMatrix::new((0..m).map(entity_name).collect(), columns).expect("names are unique")
}

enum ScalingInput {
    Series(Dataset),
    Matrix(FeatureMatrix, TargetVector),
}

/// Wall time of extraction (length and samples axes) or of testing and
/// selection (features axis) at each grid value; data generation is not
/// timed.
///
/// All inputs are generated first and the repeats cycle through the whole
/// grid, so a slow stretch on a shared machine does not hit every repeat of
/// one grid value. Each point reports its fastest repeat.
pub fn scaling_experiment(
    axis: ScalingAxis,
    grid: &[usize],
    fixed: usize,
    jobs: usize,
    repeats: usize,
    seed: u64,
) -> Result<Vec<ScalingPoint>, SynthError> {
    let reg = registry();
    let inputs = grid
        .iter()
        .map(|&value| match axis {
            ScalingAxis::Length => Ok(ScalingInput::Series(gen_two_class(fixed, value, 1.0, seed)?.0)),
            ScalingAxis::Samples => Ok(ScalingInput::Series(gen_two_class(value, fixed, 1.0, seed)?.0)),
            ScalingAxis::Features => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let matrix = noise_matrix(&mut rng, fixed, value);
                let target = TargetVector::new(random_binary_target(&mut rng, fixed)).expect("binary target");
                Ok(ScalingInput::Matrix(matrix, target))
            }
        })
        .collect::<Result<Vec<_>, SynthError>>()?;
    let mut best = vec![f64::INFINITY; grid.len()];
    for _ in 0..repeats.max(1) {
        for (input, best) in inputs.iter().zip(&mut best) {
            let start = Instant::now();
            match input {
                ScalingInput::Series(dataset) => drop(extract_all(dataset, &reg, jobs)?),
                ScalingInput::Matrix(matrix, target) => {
                    drop(build_relevance_table_par(matrix, target, 0.1, ByMode::Global, jobs)?)
                }
            }
            *best = best.min(start.elapsed().as_secs_f64());
        }
    }
    Ok(grid.iter().zip(best).map(|(&value, seconds)| ScalingPoint { value, seconds }).collect())
}
