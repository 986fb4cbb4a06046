//! Core algorithms for filtered time series feature extraction.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no I/O. It provides:
//!
//! * [`model`]: the shared domain types (series, datasets, targets, feature
//!   matrices and relevance tables).
//! * [`features`]: the catalog of univariate feature mappings and the default
//!   parameter registry.
//! * [`stats`]: the four feature significance tests and the rule that picks
//!   one of them per feature/target pair.
//! * [`selection`]: the Benjamini-Yekutieli step-up procedure and relevance
//!   table construction.
//! * [`pca`]: correlation PCA used by the reduction variants of the pipeline.
//!
//! Parallel orchestration, file formats and the command line live in the
//! `freshx` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod features;
pub mod linalg;
pub mod model;
pub mod pca;
pub mod selection;
pub mod stats;

pub use features::{extract_feature, registry, Extracted, FeatureFlag, MappingSpec, Registry};
pub use model::{
    classify_codomain, ByMode, CodomainClass, Dataset, DatasetBuilder, FeatureColumn, FeatureId, KindSeries,
    FeatureMatrix, MetaAttribute, MetaTable, ModelError, PcaPlacement, RelevanceRow, RelevanceTable, SelectionConfig,
    TargetVector, TimeSeriesSample,
};
pub use pca::{pca_reduce, PcaError, PcaResult};
pub use selection::{benjamini_yekutieli, build_relevance_table, SelectionError};
pub use stats::{dispatch_test, TestError, TestKind, TestOutcome};
