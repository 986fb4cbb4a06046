//! CSV readers and writers for datasets, targets, meta-attributes, feature
//! matrices and relevance tables.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use freshx_core::model::MetaTable;
use freshx_core::{
    Dataset, DatasetBuilder, FeatureColumn, FeatureId, FeatureMatrix, ModelError, RelevanceTable, TargetVector,
    TimeSeriesSample,
};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: line {line}, column `{column}`: cannot parse `{value}` as a finite number")]
    UnparsableValue { path: PathBuf, line: u64, column: String, value: String },
    #[error("{path}: entity `{entity}`, kind `{kind}` has time {time} more than once")]
    DuplicateTimestamp { path: PathBuf, entity: String, kind: String, time: String },
    #[error("{path}: line {line}: {message}")]
    Malformed { path: PathBuf, line: u64, message: String },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
}

impl IngestError {
    fn model(path: &Path, source: ModelError) -> Self {
        IngestError::Model { path: path.to_path_buf(), source }
    }
}

pub type Result<T> = std::result::Result<T, IngestError>;

/// Column names of the long format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongSchema {
    pub id: String,
    pub time: String,
    pub kind: String,
    pub value: String,
}

impl Default for LongSchema {
    fn default() -> Self {
        Self { id: "id".into(), time: "time".into(), kind: "kind".into(), value: "value".into() }
    }
}

/// Reader settings shared by all CSV inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { delimiter: b',' }
    }
}

struct Table {
    path: PathBuf,
    headers: Vec<String>,
    reader: csv::Reader<File>,
}

impl Table {
    fn open(path: &Path, options: &CsvOptions) -> Result<Self> {
        let file = File::open(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
        let mut reader = csv::ReaderBuilder::new().delimiter(options.delimiter).trim(csv::Trim::All).from_reader(file);
        let headers = reader
            .headers()
            .map_err(|source| IngestError::Csv { path: path.to_path_buf(), source })?
            .iter()
            .map(str::to_string)
            .collect();
        Ok(Self { path: path.to_path_buf(), headers, reader })
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| IngestError::MissingColumn {
            path: self.path.clone(),
            column: name.to_string(),
        })
    }

    /// Records with their 1-based line numbers.
    fn records(&mut self) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> + '_ {
        let path = self.path.clone();
        self.reader.records().map(move |r| {
            let record = r.map_err(|source| IngestError::Csv { path: path.clone(), source })?;
            let line = record.position().map_or(0, |p| p.line());
            Ok((line, record))
        })
    }

    fn number(&self, line: u64, record: &csv::StringRecord, column: usize) -> Result<f64> {
        let raw = record.get(column).unwrap_or("");
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(IngestError::UnparsableValue {
                path: self.path.clone(),
                line,
                column: self.headers[column].clone(),
                value: raw.to_string(),
            }),
        }
    }

    fn text<'r>(&self, line: u64, record: &'r csv::StringRecord, column: usize) -> Result<&'r str> {
        record.get(column).ok_or_else(|| IngestError::Malformed {
            path: self.path.clone(),
            line,
            message: format!("missing field `{}`", self.headers[column]),
        })
    }
}

/// Reads `id,time,kind,value` rows. Values are ordered by time within each
/// (entity, kind) pair; a repeated time is an error.
pub fn read_long_format(path: &Path, schema: &LongSchema, options: &CsvOptions) -> Result<Dataset> {
    let mut table = Table::open(path, options)?;
    let (id_col, time_col, kind_col, value_col) =
        (table.column(&schema.id)?, table.column(&schema.time)?, table.column(&schema.kind)?, table.column(&schema.value)?);

    let mut builder = DatasetBuilder::new();
    let mut group_index: HashMap<(String, String), usize> = HashMap::new();
    // (entity, kind, rows of (time, raw time, value))
    let mut groups: Vec<(String, String, Vec<(f64, String, f64)>)> = Vec::new();
    let records: Vec<(u64, csv::StringRecord)> = table.records().collect::<Result<_>>()?;
    for (line, record) in &records {
        let entity = table.text(*line, record, id_col)?;
        let kind = table.text(*line, record, kind_col)?;
        let time = table.number(*line, record, time_col)?;
        let value = table.number(*line, record, value_col)?;
        builder.intern_entity(entity);
        let key = (entity.to_string(), kind.to_string());
        let idx = *group_index.entry(key).or_insert_with(|| {
            groups.push((entity.to_string(), kind.to_string(), Vec::new()));
            groups.len() - 1
        });
        groups[idx].2.push((time, record[time_col].to_string(), value));
    }

    for (entity, kind, mut rows) in groups {
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(IngestError::DuplicateTimestamp { path: path.to_path_buf(), entity, kind, time: w[1].1.clone() });
        }
        let values = rows.into_iter().map(|r| r.2).collect();
        let sample = TimeSeriesSample::new(entity, kind, values).map_err(|e| IngestError::model(path, e))?;
        builder.push(sample).map_err(|e| IngestError::model(path, e))?;
    }
    builder.build().map_err(|e| IngestError::model(path, e))
}

/// Reads the wide format: an `id` column, an optional `time` column and one
/// column per kind. Rows of one entity form its series, ordered by `time`
/// when present and by file order otherwise.
pub fn read_wide_format(path: &Path, options: &CsvOptions) -> Result<Dataset> {
    let mut table = Table::open(path, options)?;
    let id_col = table.column("id")?;
    let time_col = table.headers.iter().position(|h| h == "time");
    let kind_cols: Vec<usize> = (0..table.headers.len()).filter(|&c| c != id_col && Some(c) != time_col).collect();

    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(f64, String, Vec<f64>)>> = HashMap::new();
    let records: Vec<(u64, csv::StringRecord)> = table.records().collect::<Result<_>>()?;
    for (line, record) in &records {
        let entity = table.text(*line, record, id_col)?.to_string();
        let time = match time_col {
            Some(c) => (table.number(*line, record, c)?, record[c].to_string()),
            None => (0.0, String::new()),
        };
        let values = kind_cols.iter().map(|&c| table.number(*line, record, c)).collect::<Result<Vec<_>>>()?;
        if !rows.contains_key(&entity) {
            order.push(entity.clone());
        }
        rows.entry(entity).or_default().push((time.0, time.1, values));
    }

    let mut builder = DatasetBuilder::new();
    for entity in &order {
        builder.intern_entity(entity);
    }
    for entity in order {
        let mut entity_rows = rows.remove(&entity).unwrap_or_default();
        if time_col.is_some() {
            entity_rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            if let Some(w) = entity_rows.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(IngestError::DuplicateTimestamp {
                    path: path.to_path_buf(),
                    entity,
                    kind: "*".to_string(),
                    time: w[1].1.clone(),
                });
            }
        }
        for (k, &c) in kind_cols.iter().enumerate() {
            let values = entity_rows.iter().map(|r| r.2[k]).collect();
            let sample = TimeSeriesSample::new(entity.clone(), table.headers[c].clone(), values)
                .map_err(|e| IngestError::model(path, e))?;
            builder.push(sample).map_err(|e| IngestError::model(path, e))?;
        }
    }
    builder.build().map_err(|e| IngestError::model(path, e))
}

/// Reads `id,target` rows and aligns them to `entity_order`. Ids that are not
/// in `entity_order` are ignored.
pub fn read_targets(path: &Path, entity_order: &[String], options: &CsvOptions) -> Result<TargetVector> {
    let mut table = Table::open(path, options)?;
    let id_col = table.column("id")?;
    let target_col = table.column("target")?;
    let mut found: HashMap<String, f64> = HashMap::new();
    let records: Vec<(u64, csv::StringRecord)> = table.records().collect::<Result<_>>()?;
    for (line, record) in &records {
        let entity = table.text(*line, record, id_col)?.to_string();
        let value = table.number(*line, record, target_col)?;
        if found.insert(entity.clone(), value).is_some() {
            return Err(IngestError::model(path, ModelError::DuplicateEntity { entity }));
        }
    }
    let values = entity_order
        .iter()
        .map(|e| {
            found
                .get(e)
                .copied()
                .ok_or_else(|| IngestError::model(path, ModelError::MissingEntity { entity: e.clone(), what: "target file" }))
        })
        .collect::<Result<Vec<_>>>()?;
    TargetVector::new(values).map_err(|e| IngestError::model(path, e))
}

/// Reads meta-attributes: the first column holds entity ids, every other
/// column one real-valued attribute.
pub fn read_meta(path: &Path, options: &CsvOptions) -> Result<MetaTable> {
    let mut table = Table::open(path, options)?;
    if table.headers.is_empty() {
        return Err(IngestError::MissingColumn { path: path.to_path_buf(), column: "id".into() });
    }
    let names = table.headers[1..].to_vec();
    let mut meta = MetaTable::new(names).map_err(|e| IngestError::model(path, e))?;
    let records: Vec<(u64, csv::StringRecord)> = table.records().collect::<Result<_>>()?;
    for (line, record) in &records {
        let entity = table.text(*line, record, 0)?.to_string();
        let values = (1..table.headers.len()).map(|c| table.number(*line, record, c)).collect::<Result<Vec<_>>>()?;
        meta.insert(entity, values).map_err(|e| IngestError::model(path, e))?;
    }
    Ok(meta)
}

/// Reads a feature matrix written by [`write_feature_matrix`].
pub fn read_feature_matrix(path: &Path, options: &CsvOptions) -> Result<FeatureMatrix> {
    let mut table = Table::open(path, options)?;
    let id_col = table.column("id")?;
    let feature_cols: Vec<usize> = (0..table.headers.len()).filter(|&c| c != id_col).collect();
    let mut entities = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); feature_cols.len()];
    let records: Vec<(u64, csv::StringRecord)> = table.records().collect::<Result<_>>()?;
    for (line, record) in &records {
        entities.push(table.text(*line, record, id_col)?.to_string());
        for (column, &c) in columns.iter_mut().zip(&feature_cols) {
            column.push(table.number(*line, record, c)?);
        }
    }
    let columns = feature_cols
        .iter()
        .zip(columns)
        .map(|(&c, values)| FeatureColumn::new(FeatureId::parse(&table.headers[c]), values))
        .collect();
    FeatureMatrix::new(entities, columns).map_err(|e| IngestError::model(path, e))
}

/// Formats `v` like C's `%.17g`: 17 significant digits, trailing zeros
/// removed, exponent form outside `1e-5 <= |v| < 1e17`.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        let fixed = format!("{v:.decimals$}");
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })
}

fn csv_writer(path: &Path, options: &CsvOptions) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new().delimiter(options.delimiter).from_writer(create(path)?))
}

fn finish(path: &Path, writer: csv::Writer<BufWriter<File>>) -> Result<()> {
    let mut inner = writer
        .into_inner()
        .map_err(|e| IngestError::Io { path: path.to_path_buf(), source: e.into_error() })?;
    inner.flush().map_err(|source| IngestError::Io { path: path.to_path_buf(), source })
}

fn write_err(path: &Path) -> impl Fn(csv::Error) -> IngestError + '_ {
    move |source| IngestError::Csv { path: path.to_path_buf(), source }
}

/// Writes `id` followed by one column per feature.
pub fn write_feature_matrix(matrix: &FeatureMatrix, path: &Path, options: &CsvOptions) -> Result<()> {
    let mut w = csv_writer(path, options)?;
    let header: Vec<String> =
        std::iter::once("id".to_string()).chain(matrix.columns().iter().map(|c| c.id().to_string())).collect();
    w.write_record(&header).map_err(write_err(path))?;
    for (row, entity) in matrix.entity_order().iter().enumerate() {
        let mut record = Vec::with_capacity(matrix.n_columns() + 1);
        record.push(entity.clone());
        record.extend(matrix.columns().iter().map(|c| format_g17(c.values()[row])));
        w.write_record(&record).map_err(write_err(path))?;
    }
    finish(path, w)
}

/// Writes `feature,p_value,test,relevant`; untested features get `NA`.
pub fn write_relevance_table(table: &RelevanceTable, path: &Path, options: &CsvOptions) -> Result<()> {
    let mut w = csv_writer(path, options)?;
    w.write_record(["feature", "p_value", "test", "relevant"]).map_err(write_err(path))?;
    for row in table.rows() {
        let p = row.p_value.map_or_else(|| "NA".to_string(), format_g17);
        w.write_record([row.feature.to_string(), p, row.test.to_string(), row.relevant.to_string()])
            .map_err(write_err(path))?;
    }
    finish(path, w)
}

/// Writes a dataset in the long format, one row per value, `time` being the
/// 0-based sample index.
pub fn write_long_format(dataset: &Dataset, path: &Path, options: &CsvOptions) -> Result<()> {
    let mut w = csv_writer(path, options)?;
    w.write_record(["id", "time", "kind", "value"]).map_err(write_err(path))?;
    for (e, entity) in dataset.entity_order().iter().enumerate() {
        for kind in dataset.kinds() {
            for (t, v) in kind.samples()[e].values().iter().enumerate() {
                w.write_record([entity.as_str(), &t.to_string(), kind.name(), &format_g17(*v)])
                    .map_err(write_err(path))?;
            }
        }
    }
    finish(path, w)
}

/// Writes `id,target`.
pub fn write_targets(entity_order: &[String], target: &TargetVector, path: &Path, options: &CsvOptions) -> Result<()> {
    let mut w = csv_writer(path, options)?;
    w.write_record(["id", "target"]).map_err(write_err(path))?;
    for (entity, v) in entity_order.iter().zip(target.values()) {
        w.write_record([entity.as_str(), &format_g17(*v)]).map_err(write_err(path))?;
    }
    finish(path, w)
}

/// Writes `id` followed by one column per meta-attribute.
pub fn write_meta(dataset: &Dataset, path: &Path, options: &CsvOptions) -> Result<()> {
    let mut w = csv_writer(path, options)?;
    let header: Vec<&str> = std::iter::once("id").chain(dataset.meta().iter().map(|a| a.name())).collect();
    w.write_record(&header).map_err(write_err(path))?;
    for (row, entity) in dataset.entity_order().iter().enumerate() {
        let record: Vec<String> = std::iter::once(entity.clone())
            .chain(dataset.meta().iter().map(|a| format_g17(a.values()[row])))
            .collect();
        w.write_record(&record).map_err(write_err(path))?;
    }
    finish(path, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(format_g17(2.5), "2.5");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(-3.0), "-3");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(1e17), "1e+17");
        assert_eq!(format_g17(123456.0), "123456");
        assert_eq!(format_g17(0.0001), "0.0001");
        assert_eq!(format_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_g17(0.0), "0");
    }

    #[test]
    fn g17_round_trips() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 6.02e23, -7.5e-9, f64::MAX, f64::MIN_POSITIVE] {
            assert_eq!(format_g17(v).parse::<f64>().unwrap().to_bits(), v.to_bits(), "{v}");
        }
    }
}
