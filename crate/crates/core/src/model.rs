//! Domain types shared by every stage of the pipeline.
//!
//! Everything here is immutable once constructed, so values can be shared
//! freely between worker threads.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::features::Registry;
use crate::stats::TestKind;

/// Errors raised when constructing model types.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("series for entity `{entity}` and kind `{kind}` is empty")]
    EmptySeries { entity: String, kind: String },
    #[error("series for entity `{entity}` and kind `{kind}` has a non-finite value at index {index}")]
    NonFiniteValue { entity: String, kind: String, index: usize },
    #[error("invalid name `{name}`: names must be non-empty and must not contain `__`")]
    InvalidName { name: String },
    #[error("entity `{entity}` has more than one series of kind `{kind}`")]
    DuplicateSample { entity: String, kind: String },
    #[error("entity `{entity}` has no series of kind `{kind}`")]
    MissingSample { entity: String, kind: String },
    #[error("kind `{kind}` is ragged: expected length {expected}, entity `{entity}` has {found}")]
    RaggedKind { kind: String, entity: String, expected: usize, found: usize },
    #[error("entity `{entity}` is missing from the {what}")]
    MissingEntity { entity: String, what: &'static str },
    #[error("entity `{entity}` appears more than once")]
    DuplicateEntity { entity: String },
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("target is constant; at least two distinct values are required")]
    ConstantTarget,
    #[error("target has a non-finite value at index {index}")]
    NonFiniteTarget { index: usize },
    #[error("feature `{id}` appears more than once")]
    DuplicateFeature { id: String },
}

/// Codomain of a value vector, decided by its exact number of distinct values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodomainClass {
    Constant,
    Binary,
    Continuous,
}

/// Classifies `values` by exact distinct-value count: one value is
/// [`CodomainClass::Constant`], two are [`CodomainClass::Binary`], anything
/// else is [`CodomainClass::Continuous`]. An empty slice counts as constant.
pub fn classify_codomain(values: &[f64]) -> CodomainClass {
    let mut iter = values.iter().copied();
    let Some(first) = iter.next() else {
        return CodomainClass::Constant;
    };
    let mut second: Option<f64> = None;
    for v in iter {
        if v == first {
            continue;
        }
        match second {
            None => second = Some(v),
            Some(s) if s == v => {}
            Some(_) => return CodomainClass::Continuous,
        }
    }
    if second.is_some() {
        CodomainClass::Binary
    } else {
        CodomainClass::Constant
    }
}

fn validate_name(name: &str) -> Result<(), ModelError> {
    if name.is_empty() || name.contains("__") {
        return Err(ModelError::InvalidName { name: name.to_string() });
    }
    Ok(())
}

/// One uniformly sampled series of a given kind recorded for one entity.
///
/// The index is the time axis; the sampling interval is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesSample {
    entity: String,
    kind: String,
    values: Vec<f64>,
}

impl TimeSeriesSample {
    pub fn new(
        entity: impl Into<String>,
        kind: impl Into<String>,
        values: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let entity = entity.into();
        let kind = kind.into();
        validate_name(&kind)?;
        if values.is_empty() {
            return Err(ModelError::EmptySeries { entity, kind });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteValue { entity, kind, index });
        }
        Ok(Self { entity, kind, values })
    }

    pub fn entity(&self) -> &str {
        &self.entity
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// All series of one kind, aligned to the dataset's entity order.
#[derive(Debug, Clone, PartialEq)]
pub struct KindSeries {
    name: String,
    samples: Vec<TimeSeriesSample>,
}

impl KindSeries {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn samples(&self) -> &[TimeSeriesSample] {
        &self.samples
    }

    /// Common series length of this kind.
    pub fn series_len(&self) -> usize {
        self.samples.first().map_or(0, TimeSeriesSample::len)
    }
}

/// A static per-entity attribute, aligned to the dataset's entity order.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaAttribute {
    name: String,
    values: Vec<f64>,
}

impl MetaAttribute {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Static attributes keyed by entity, as read from a side file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetaTable {
    names: Vec<String>,
    rows: BTreeMap<String, Vec<f64>>,
}

impl MetaTable {
    pub fn new(names: Vec<String>) -> Result<Self, ModelError> {
        for name in &names {
            validate_name(name)?;
        }
        Ok(Self { names, rows: BTreeMap::new() })
    }

    pub fn insert(&mut self, entity: impl Into<String>, values: Vec<f64>) -> Result<(), ModelError> {
        let entity = entity.into();
        if values.len() != self.names.len() {
            return Err(ModelError::LengthMismatch { expected: self.names.len(), found: values.len() });
        }
        if self.rows.contains_key(&entity) {
            return Err(ModelError::DuplicateEntity { entity });
        }
        self.rows.insert(entity, values);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, entity: &str) -> Option<&[f64]> {
        self.rows.get(entity).map(Vec::as_slice)
    }
}

/// `m` entities with `n` kinds of series each, plus optional meta-attributes.
///
/// Every kind is present for every entity and all series of one kind have the
/// same length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    entity_order: Vec<String>,
    kinds: Vec<KindSeries>,
    meta: Vec<MetaAttribute>,
}

impl Dataset {
    pub fn entity_order(&self) -> &[String] {
        &self.entity_order
    }

    pub fn n_entities(&self) -> usize {
        self.entity_order.len()
    }

    pub fn kinds(&self) -> &[KindSeries] {
        &self.kinds
    }

    pub fn meta(&self) -> &[MetaAttribute] {
        &self.meta
    }

    /// Attaches meta-attributes; every entity must have a row in `table`.
    pub fn with_meta(mut self, table: &MetaTable) -> Result<Self, ModelError> {
        let mut columns: Vec<Vec<f64>> = table.names.iter().map(|_| Vec::new()).collect();
        for entity in &self.entity_order {
            let row = table.get(entity).ok_or_else(|| ModelError::MissingEntity {
                entity: entity.clone(),
                what: "meta table",
            })?;
            for (column, v) in columns.iter_mut().zip(row) {
                column.push(*v);
            }
        }
        self.meta = table
            .names
            .iter()
            .cloned()
            .zip(columns)
            .map(|(name, values)| MetaAttribute { name, values })
            .collect();
        Ok(self)
    }

    /// Returns the same data with rows in the given entity order, which must
    /// be a permutation of the current one.
    pub fn reordered(&self, order: &[String]) -> Result<Self, ModelError> {
        let index: BTreeMap<&str, usize> =
            self.entity_order.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
        if order.len() != self.entity_order.len() {
            return Err(ModelError::LengthMismatch { expected: self.entity_order.len(), found: order.len() });
        }
        let mut seen = BTreeSet::new();
        let mut perm = Vec::with_capacity(order.len());
        for entity in order {
            let i = *index.get(entity.as_str()).ok_or_else(|| ModelError::MissingEntity {
                entity: entity.clone(),
                what: "dataset",
            })?;
            if !seen.insert(i) {
                return Err(ModelError::DuplicateEntity { entity: entity.clone() });
            }
            perm.push(i);
        }
        let kinds = self
            .kinds
            .iter()
            .map(|k| KindSeries {
                name: k.name.clone(),
                samples: perm.iter().map(|&i| k.samples[i].clone()).collect(),
            })
            .collect();
        let meta = self
            .meta
            .iter()
            .map(|a| MetaAttribute {
                name: a.name.clone(),
                values: perm.iter().map(|&i| a.values[i]).collect(),
            })
            .collect();
        Ok(Self { entity_order: order.to_vec(), kinds, meta })
    }
}

/// Collects samples in arbitrary order and validates them into a [`Dataset`].
///
/// Entity and kind order follow first appearance.
#[derive(Debug, Default)]
pub struct DatasetBuilder {
    entity_order: Vec<String>,
    entity_index: BTreeMap<String, usize>,
    kind_order: Vec<String>,
    kind_index: BTreeMap<String, usize>,
    samples: BTreeMap<(usize, usize), TimeSeriesSample>,
}

impl DatasetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sample: TimeSeriesSample) -> Result<(), ModelError> {
        let entity = self.intern_entity(sample.entity());
        let kind = match self.kind_index.get(sample.kind()) {
            Some(&k) => k,
            None => {
                let k = self.kind_order.len();
                self.kind_order.push(sample.kind().to_string());
                self.kind_index.insert(sample.kind().to_string(), k);
                k
            }
        };
        if self.samples.contains_key(&(kind, entity)) {
            return Err(ModelError::DuplicateSample {
                entity: sample.entity.clone(),
                kind: sample.kind.clone(),
            });
        }
        self.samples.insert((kind, entity), sample);
        Ok(())
    }

    /// Registers an entity without any series, fixing its position in the
    /// entity order.
    pub fn intern_entity(&mut self, entity: &str) -> usize {
        if let Some(&i) = self.entity_index.get(entity) {
            return i;
        }
        let i = self.entity_order.len();
        self.entity_order.push(entity.to_string());
        self.entity_index.insert(entity.to_string(), i);
        i
    }

    pub fn build(mut self) -> Result<Dataset, ModelError> {
        let mut kinds = Vec::with_capacity(self.kind_order.len());
        for (k, name) in self.kind_order.iter().enumerate() {
            let mut samples = Vec::with_capacity(self.entity_order.len());
            let mut expected: Option<(usize, &str)> = None;
            for (e, entity) in self.entity_order.iter().enumerate() {
                let sample = self.samples.remove(&(k, e)).ok_or_else(|| ModelError::MissingSample {
                    entity: entity.clone(),
                    kind: name.clone(),
                })?;
                match expected {
                    None => expected = Some((sample.len(), entity)),
                    Some((len, _)) if len != sample.len() => {
                        return Err(ModelError::RaggedKind {
                            kind: name.clone(),
                            entity: entity.clone(),
                            expected: len,
                            found: sample.len(),
                        })
                    }
                    Some(_) => {}
                }
                samples.push(sample);
            }
            kinds.push(KindSeries { name: name.clone(), samples });
        }
        Ok(Dataset { entity_order: self.entity_order, kinds, meta: Vec::new() })
    }
}

/// The prediction target, one value per entity.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    values: Vec<f64>,
    class: CodomainClass,
}

impl TargetVector {
    /// Wraps target values; a constant target is rejected because no
    /// significance test applies to it.
    pub fn new(values: Vec<f64>) -> Result<Self, ModelError> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteTarget { index });
        }
        let class = classify_codomain(&values);
        if class == CodomainClass::Constant {
            return Err(ModelError::ConstantTarget);
        }
        Ok(Self { values, class })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn class(&self) -> CodomainClass {
        self.class
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Structured column identity.
///
/// Rendered as `<kind>__<mapping>[__<param>-<value>...]` for series features,
/// `<attribute>__meta` for meta-attributes and `pc-<n>` for principal
/// components. Headers that match none of these are kept verbatim.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureId {
    Series { kind: String, mapping: String, params: Vec<(String, f64)> },
    Meta { attribute: String },
    Component(usize),
    Other(String),
}

impl FeatureId {
    /// Parses a rendered column name. Never fails: unknown shapes become
    /// [`FeatureId::Other`].
    pub fn parse(name: &str) -> Self {
        if let Some(n) = name.strip_prefix("pc-").and_then(|s| s.parse::<usize>().ok()) {
            if n >= 1 && format!("pc-{n}") == name {
                return FeatureId::Component(n);
            }
        }
        let parts: Vec<&str> = name.split("__").collect();
        if parts.len() >= 2 && parts.iter().all(|p| !p.is_empty()) {
            if parts.len() == 2 && parts[1] == "meta" {
                return FeatureId::Meta { attribute: parts[0].to_string() };
            }
            let mut params = Vec::with_capacity(parts.len() - 2);
            for p in &parts[2..] {
                let Some((key, value)) = p.split_once('-') else {
                    return FeatureId::Other(name.to_string());
                };
                match value.parse::<f64>() {
                    Ok(v) if !key.is_empty() && format!("{v}") == value => params.push((key.to_string(), v)),
                    _ => return FeatureId::Other(name.to_string()),
                }
            }
            return FeatureId::Series {
                kind: parts[0].to_string(),
                mapping: parts[1].to_string(),
                params,
            };
        }
        FeatureId::Other(name.to_string())
    }

    /// The series kind this feature was computed from, if any.
    pub fn kind(&self) -> Option<&str> {
        match self {
            FeatureId::Series { kind, .. } => Some(kind),
            _ => None,
        }
    }

    pub fn mapping(&self) -> Option<&str> {
        match self {
            FeatureId::Series { mapping, .. } => Some(mapping),
            FeatureId::Meta { .. } => Some("meta"),
            _ => None,
        }
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureId::Series { kind, mapping, params } => {
                write!(f, "{kind}__{mapping}")?;
                for (k, v) in params {
                    write!(f, "__{k}-{v}")?;
                }
                Ok(())
            }
            FeatureId::Meta { attribute } => write!(f, "{attribute}__meta"),
            FeatureId::Component(n) => write!(f, "pc-{n}"),
            FeatureId::Other(s) => f.write_str(s),
        }
    }
}

/// One feature vector over all entities.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    id: FeatureId,
    values: Vec<f64>,
    class: CodomainClass,
    flagged: bool,
}

impl FeatureColumn {
    pub fn new(id: FeatureId, values: Vec<f64>) -> Self {
        Self::with_flag(id, values, false)
    }

    /// `flagged` marks columns where at least one value had to be replaced
    /// (non-finite result or invalid parameters).
    pub fn with_flag(id: FeatureId, values: Vec<f64>, flagged: bool) -> Self {
        let class = classify_codomain(&values);
        Self { id, values, class, flagged }
    }

    pub fn id(&self) -> &FeatureId {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn class(&self) -> CodomainClass {
        self.class
    }

    pub fn is_flagged(&self) -> bool {
        self.flagged
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `m x n_phi` feature matrix stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    entity_order: Vec<String>,
    columns: Vec<FeatureColumn>,
}

impl FeatureMatrix {
    pub fn new(entity_order: Vec<String>, columns: Vec<FeatureColumn>) -> Result<Self, ModelError> {
        let m = entity_order.len();
        let mut seen = BTreeSet::new();
        for column in &columns {
            if column.len() != m {
                return Err(ModelError::LengthMismatch { expected: m, found: column.len() });
            }
            let name = column.id.to_string();
            if !seen.insert(name.clone()) {
                return Err(ModelError::DuplicateFeature { id: name });
            }
        }
        Ok(Self { entity_order, columns })
    }

    pub fn empty(entity_order: Vec<String>) -> Self {
        Self { entity_order, columns: Vec::new() }
    }

    pub fn entity_order(&self) -> &[String] {
        &self.entity_order
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.entity_order.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, id: &FeatureId) -> Option<&FeatureColumn> {
        self.columns.iter().find(|c| &c.id == id)
    }

    /// Keeps the columns whose mask entry is true, in their original order.
    pub fn filter(&self, keep: &[bool]) -> Self {
        let columns = self
            .columns
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(c, _)| c.clone())
            .collect();
        Self { entity_order: self.entity_order.clone(), columns }
    }

    pub fn into_columns(self) -> Vec<FeatureColumn> {
        self.columns
    }
}

/// Result of testing one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceRow {
    pub feature: FeatureId,
    /// `None` when the feature could not be tested (constant column).
    pub p_value: Option<f64>,
    pub test: TestKind,
    pub relevant: bool,
}

/// Per-feature p-values and the multiple-testing decision.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RelevanceTable {
    rows: Vec<RelevanceRow>,
}

impl RelevanceTable {
    pub fn new(rows: Vec<RelevanceRow>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[RelevanceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn relevance_mask(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.relevant).collect()
    }

    pub fn n_relevant(&self) -> usize {
        self.rows.iter().filter(|r| r.relevant).count()
    }
}

/// Where the optional PCA step runs relative to the significance tests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PcaPlacement {
    #[default]
    None,
    Before,
    After,
}

/// How the Benjamini-Yekutieli rejection line is built.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ByMode {
    /// Constant `c(n) = sum_{mu=1}^{n} 1/mu` shared by every rank.
    #[default]
    Global,
    /// Partial harmonic sum up to the rank, `sum_{mu=1}^{k} 1/mu`.
    PerFeature,
}

/// Knobs for the full extraction and selection run.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub q: f64,
    pub pca_placement: PcaPlacement,
    pub pca_variance_fraction: f64,
    pub by_mode: ByMode,
    pub registry: Registry,
    pub worker_count: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            q: 0.10,
            pca_placement: PcaPlacement::None,
            pca_variance_fraction: 0.95,
            by_mode: ByMode::Global,
            registry: crate::features::registry(),
            worker_count: 1,
        }
    }
}

impl SelectionConfig {
    /// Checks `q` and the variance fraction lie in `(0, 1]` and that at least
    /// one worker is requested.
    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err("FDR level q must lie in (0, 1]");
        }
        if !(self.pca_variance_fraction > 0.0 && self.pca_variance_fraction <= 1.0) {
            return Err("PCA variance fraction must lie in (0, 1]");
        }
        if self.worker_count == 0 {
            return Err("worker count must be positive");
        }
        Ok(())
    }
}
