//! Feature registry configuration files.
//!
//! A config is a TOML document with a `[mappings]` table. Each key is a
//! mapping name and its value is one of
//!
//! * `true` for a mapping without parameters (`false` disables it),
//! * a table of parameter lists, expanded as a cartesian grid:
//!   `quantile = { q = [0.1, 0.5, 0.9] }`,
//! * an array of explicit bindings:
//!   `arima_model_coefficients = [{ i = 0, k = 10 }, { i = 1, k = 3 }]`.
//!
//! ```toml
//! [mappings]
//! mean = true
//! quantile = { q = [0.25, 0.75] }
//! large_number_of_peaks = [{ l = 1, m = 5 }]
//! ```
//!
//! The resulting registry lists mappings in catalog order.

use std::path::{Path, PathBuf};

use freshx_core::features::SpecError;
use freshx_core::{MappingSpec, Registry};
use toml::{Table, Value};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config: missing `[mappings]` table")]
    MissingMappings,
    #[error("config: mapping `{mapping}`: {message}")]
    Shape { mapping: String, message: String },
    #[error("config: {0}")]
    Spec(#[from] SpecError),
}

fn shape(mapping: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Shape { mapping: mapping.to_string(), message: message.into() }
}

fn number(mapping: &str, param: &str, value: &Value) -> Result<f64, ConfigError> {
    match value {
        Value::Integer(i) => Ok(*i as f64),
        Value::Float(f) => Ok(*f),
        _ => Err(shape(mapping, format!("parameter `{param}` must be a number"))),
    }
}

fn explicit(mapping: &str, table: &Table) -> Result<MappingSpec, ConfigError> {
    let params: Vec<(String, f64)> =
        table.iter().map(|(k, v)| Ok((k.clone(), number(mapping, k, v)?))).collect::<Result<_, ConfigError>>()?;
    let borrowed: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    Ok(MappingSpec::from_parts(mapping, &borrowed)?)
}

fn grid(mapping: &str, table: &Table) -> Result<Vec<MappingSpec>, ConfigError> {
    let mut axes: Vec<(&str, Vec<f64>)> = Vec::new();
    for (param, value) in table {
        let values = match value {
            Value::Array(items) => items.iter().map(|v| number(mapping, param, v)).collect::<Result<Vec<_>, _>>()?,
            other => vec![number(mapping, param, other)?],
        };
        if values.is_empty() {
            return Ok(Vec::new());
        }
        axes.push((param.as_str(), values));
    }
    let mut combos: Vec<Vec<(&str, f64)>> = vec![Vec::new()];
    for (param, values) in &axes {
        combos = combos
            .into_iter()
            .flat_map(|combo| {
                values.iter().map(move |&v| {
                    let mut next = combo.clone();
                    next.push((*param, v));
                    next
                })
            })
            .collect();
    }
    combos.iter().map(|c| Ok(MappingSpec::from_parts(mapping, c)?)).collect()
}

/// Builds a registry from config text.
pub fn parse_registry(text: &str) -> Result<Registry, ConfigError> {
    let doc: Table = text.parse()?;
    let mappings = match doc.get("mappings") {
        Some(Value::Table(t)) => t,
        _ => return Err(ConfigError::MissingMappings),
    };
    let mut specs = Vec::new();
    for (mapping, value) in mappings {
        match value {
            Value::Boolean(true) => specs.push(MappingSpec::from_parts(mapping, &[])?),
            Value::Boolean(false) => {}
            Value::Table(t) => specs.extend(grid(mapping, t)?),
            Value::Array(items) => {
                for item in items {
                    let Value::Table(t) = item else {
                        return Err(shape(mapping, "array entries must be parameter tables"));
                    };
                    specs.push(explicit(mapping, t)?);
                }
            }
            _ => return Err(shape(mapping, "expected `true`, a parameter table or an array of tables")),
        }
    }
    Ok(Registry::in_catalog_order(specs))
}

pub fn load_registry(path: &Path) -> Result<Registry, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_registry(&text)
}
