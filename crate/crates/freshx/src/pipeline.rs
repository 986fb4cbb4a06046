//! Parallel extraction, testing and selection.
//!
//! Work runs in two parallel tiers separated by barriers: feature extraction
//! over every (kind, entity) series, then one significance test per feature
//! column. The Benjamini-Yekutieli step runs once all p-values exist. Results
//! are gathered in task order, so the output does not depend on the number of
//! workers.

use freshx_core::features::extract_series;
use freshx_core::selection::relevance_from_outcomes;
use freshx_core::stats::TestOutcome;
use freshx_core::{
    dispatch_test, pca_reduce, ByMode, Dataset, FeatureColumn, FeatureId, FeatureMatrix, ModelError, PcaError, PcaPlacement,
    Registry, RelevanceTable, SelectionConfig, SelectionError, TargetVector,
};
use log::{info, warn};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("target has {found} values but the dataset has {expected} entities")]
    TargetLength { expected: usize, found: usize },
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Filtered features and the per-feature decisions that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct FreshOutput {
    pub matrix: FeatureMatrix,
    pub table: RelevanceTable,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, PipelineError> {
    if workers == 0 {
        return Err(PipelineError::Config("worker count must be positive"));
    }
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

/// Applies every registry mapping to every series and appends one column per
/// meta-attribute.
///
/// Columns are ordered by kind, then registry order; meta columns come last.
/// A column is flagged when any entity's value was replaced.
pub fn extract_all(dataset: &Dataset, registry: &Registry, workers: usize) -> Result<FeatureMatrix, PipelineError> {
    let m = dataset.n_entities();
    let specs = registry.specs();
    let tasks: Vec<(usize, usize)> =
        (0..dataset.kinds().len()).flat_map(|k| (0..m).map(move |e| (k, e))).collect();
    let results: Vec<Vec<freshx_core::Extracted>> = pool(workers)?.install(|| {
        tasks
            .par_iter()
            .map(|&(k, e)| extract_series(specs, dataset.kinds()[k].samples()[e].values()))
            .collect()
    });

    let mut columns = Vec::with_capacity(dataset.kinds().len() * specs.len() + dataset.meta().len());
    for (k, kind) in dataset.kinds().iter().enumerate() {
        let rows = &results[k * m..(k + 1) * m];
        for (j, spec) in specs.iter().enumerate() {
            let values: Vec<f64> = rows.iter().map(|r| r[j].value).collect();
            let flagged = rows.iter().any(|r| r[j].flag.is_some());
            columns.push(FeatureColumn::with_flag(spec.feature_id(kind.name()), values, flagged));
        }
    }
    for attribute in dataset.meta() {
        columns.push(FeatureColumn::new(
            FeatureId::Meta { attribute: attribute.name().to_string() },
            attribute.values().to_vec(),
        ));
    }
    let flagged = columns.iter().filter(|c| c.is_flagged()).count();
    if flagged > 0 {
        warn!("{flagged} feature columns contain values replaced by 0");
    }
    // Fails only on repeated names, e.g. a registry listing a spec twice.
    Ok(FeatureMatrix::new(dataset.entity_order().to_vec(), columns)?)
}

/// Runs the matching significance test for every column in parallel.
pub fn test_all(
    matrix: &FeatureMatrix,
    target: &TargetVector,
    workers: usize,
) -> Result<Vec<Option<TestOutcome>>, PipelineError> {
    if matrix.n_columns() > 0 && matrix.n_rows() != target.len() {
        return Err(PipelineError::TargetLength { expected: matrix.n_rows(), found: target.len() });
    }
    let outcomes = pool(workers)?.install(|| {
        matrix.columns().par_iter().map(|c| dispatch_test(c, target)).collect::<Result<Vec<_>, _>>()
    });
    Ok(outcomes.map_err(SelectionError::from)?)
}

/// Tests every column and applies the Benjamini-Yekutieli procedure.
pub fn build_relevance_table_par(
    matrix: &FeatureMatrix,
    target: &TargetVector,
    q: f64,
    mode: ByMode,
    workers: usize,
) -> Result<RelevanceTable, PipelineError> {
    let outcomes = test_all(matrix, target, workers)?;
    Ok(relevance_from_outcomes(matrix, &outcomes, q, mode)?)
}

/// Selection on an existing feature matrix: the columns found relevant and
/// the full relevance table.
pub fn select(
    matrix: &FeatureMatrix,
    target: &TargetVector,
    config: &SelectionConfig,
) -> Result<FreshOutput, PipelineError> {
    config.validate().map_err(PipelineError::Config)?;
    let table = build_relevance_table_par(matrix, target, config.q, config.by_mode, config.worker_count)?;
    let filtered = matrix.filter(&table.relevance_mask());
    info!("{} of {} features relevant", filtered.n_columns(), matrix.n_columns());
    Ok(FreshOutput { matrix: filtered, table })
}

fn check_target(dataset: &Dataset, target: &TargetVector) -> Result<(), PipelineError> {
    if dataset.n_entities() != target.len() {
        return Err(PipelineError::TargetLength { expected: dataset.n_entities(), found: target.len() });
    }
    Ok(())
}

/// Extraction, testing and selection; `config.pca_placement` is ignored.
pub fn run_fresh(dataset: &Dataset, target: &TargetVector, config: &SelectionConfig) -> Result<FreshOutput, PipelineError> {
    config.validate().map_err(PipelineError::Config)?;
    check_target(dataset, target)?;
    let matrix = extract_all(dataset, &config.registry, config.worker_count)?;
    select(&matrix, target, config)
}

/// Extraction, then PCA, then testing and selection of the components.
pub fn run_fresh_pca_before(
    dataset: &Dataset,
    target: &TargetVector,
    config: &SelectionConfig,
) -> Result<FreshOutput, PipelineError> {
    config.validate().map_err(PipelineError::Config)?;
    check_target(dataset, target)?;
    let matrix = extract_all(dataset, &config.registry, config.worker_count)?;
    let reduced = pca_reduce(&matrix, config.pca_variance_fraction)?;
    select(&reduced.matrix, target, config)
}

/// Extraction, testing and selection, then PCA on the relevant features.
///
/// When no non-constant feature survives selection the output matrix is
/// empty and a warning is logged.
pub fn run_fresh_pca_after(
    dataset: &Dataset,
    target: &TargetVector,
    config: &SelectionConfig,
) -> Result<FreshOutput, PipelineError> {
    let FreshOutput { matrix, table } = run_fresh(dataset, target, config)?;
    match pca_reduce(&matrix, config.pca_variance_fraction) {
        Ok(reduced) => Ok(FreshOutput { matrix: reduced.matrix, table }),
        Err(PcaError::EmptyAfterConstantDrop) => {
            warn!("no relevant non-constant features; PCA output is empty");
            Ok(FreshOutput { matrix: FeatureMatrix::empty(matrix.entity_order().to_vec()), table })
        }
        Err(e) => Err(e.into()),
    }
}

/// Runs the variant selected by `config.pca_placement`.
pub fn run(dataset: &Dataset, target: &TargetVector, config: &SelectionConfig) -> Result<FreshOutput, PipelineError> {
    match config.pca_placement {
        PcaPlacement::None => run_fresh(dataset, target, config),
        PcaPlacement::Before => run_fresh_pca_before(dataset, target, config),
        PcaPlacement::After => run_fresh_pca_after(dataset, target, config),
    }
}
