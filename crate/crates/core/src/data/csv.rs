//! CSV input with a declarative schema.
//!
//! Loading is split in two: a vocabulary pass that fixes the category order of
//! every categorical column, and an encoding pass that one-hot encodes,
//! parses numbers and maps labels to ±1. Sharded inputs share one vocabulary
//! so every shard gets the same feature layout.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Attribute, Dataset, Sample};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSchema {
    pub label: LabelSpec,
    #[serde(default)]
    pub sensitive: Vec<SensitiveSpec>,
    pub features: Vec<FeatureSpec>,
    /// Cell values treated as missing; rows containing one are dropped.
    #[serde(default = "default_missing")]
    pub missing: Vec<String>,
}

fn default_missing() -> Vec<String> {
    vec![String::new(), "?".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelSpec {
    pub column: String,
    pub positive: Vec<String>,
    /// When given, any value outside `positive` and `negative` is an error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitiveSpec {
    pub column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    /// Real-valued, z-scored on load.
    Continuous,
    /// One-hot encoded.
    Categorical,
    /// Already numeric and never normalized.
    Encoded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    pub column: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

impl FeatureSpec {
    pub fn continuous(column: &str) -> Self {
        FeatureSpec {
            column: column.into(),
            kind: FeatureKind::Continuous,
            categories: None,
        }
    }

    pub fn categorical(column: &str) -> Self {
        FeatureSpec {
            column: column.into(),
            kind: FeatureKind::Categorical,
            categories: None,
        }
    }
}

/// Raw string table.
#[derive(Debug, Clone, Default)]
pub(crate) struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table> {
        if !path.exists() {
            return Err(Error::io(
                path,
                std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
            ));
        }
        let mut reader = ::csv::ReaderBuilder::new()
            .trim(::csv::Trim::All)
            .from_path(path)?;
        let headers = reader.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            rows.push(record?.iter().map(str::to_string).collect());
        }
        Ok(Table { headers, rows })
    }

    /// Index of the first column named `name`.
    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
    }
}

/// Category order of every categorical column named in a schema.
#[derive(Debug, Clone, Default)]
pub(crate) struct Vocabulary {
    categories: HashMap<String, Vec<String>>,
}

impl Vocabulary {
    /// Explicit schema categories win; otherwise the sorted distinct values
    /// seen in the (non-missing) rows of all tables.
    pub fn fit(schema: &CsvSchema, tables: &[&Table]) -> Result<Vocabulary> {
        let mut wanted: Vec<(&str, Option<&Vec<String>>)> = schema
            .sensitive
            .iter()
            .map(|s| (s.column.as_str(), s.categories.as_ref()))
            .collect();
        wanted.extend(
            schema
                .features
                .iter()
                .filter(|f| f.kind == FeatureKind::Categorical)
                .map(|f| (f.column.as_str(), f.categories.as_ref())),
        );
        let mut categories = HashMap::new();
        for (column, explicit) in wanted {
            let cats = match explicit {
                Some(c) => c.clone(),
                None => {
                    let mut seen = BTreeSet::new();
                    for table in tables {
                        let used = used_columns(schema, table)?;
                        let idx = table.column(column)?;
                        for row in &table.rows {
                            if !row_has_missing(row, &used, &schema.missing) {
                                seen.insert(row[idx].clone());
                            }
                        }
                    }
                    seen.into_iter().collect()
                }
            };
            if cats.is_empty() {
                return Err(Error::Schema(format!(
                    "column `{column}` has no categories"
                )));
            }
            categories.insert(column.to_string(), cats);
        }
        Ok(Vocabulary { categories })
    }

    fn get(&self, column: &str) -> &[String] {
        &self.categories[column]
    }
}

fn used_columns(schema: &CsvSchema, table: &Table) -> Result<Vec<usize>> {
    let mut cols = vec![table.column(&schema.label.column)?];
    for s in &schema.sensitive {
        cols.push(table.column(&s.column)?);
    }
    for f in &schema.features {
        cols.push(table.column(&f.column)?);
    }
    Ok(cols)
}

fn row_has_missing(row: &[String], used: &[usize], missing: &[String]) -> bool {
    used.iter().any(|&c| missing.iter().any(|m| *m == row[c]))
}

/// Encodes a table without normalizing continuous columns.
pub(crate) fn encode(table: &Table, schema: &CsvSchema, vocab: &Vocabulary) -> Result<Dataset> {
    let used = used_columns(schema, table)?;
    let label_idx = table.column(&schema.label.column)?;

    let mut feature_names = Vec::new();
    let mut continuous = Vec::new();
    for f in &schema.features {
        match f.kind {
            FeatureKind::Continuous | FeatureKind::Encoded => {
                feature_names.push(f.column.clone());
                continuous.push(f.kind == FeatureKind::Continuous);
            }
            FeatureKind::Categorical => {
                for cat in vocab.get(&f.column) {
                    feature_names.push(format!("{}={}", f.column, cat));
                    continuous.push(false);
                }
            }
        }
    }
    let attributes: Vec<Attribute> = schema
        .sensitive
        .iter()
        .map(|s| Attribute {
            name: s.name.clone().unwrap_or_else(|| s.column.clone()),
            categories: vocab.get(&s.column).to_vec(),
        })
        .collect();

    let mut samples = Vec::with_capacity(table.rows.len());
    let mut dropped = 0usize;
    for (r, row) in table.rows.iter().enumerate() {
        if row_has_missing(row, &used, &schema.missing) {
            dropped += 1;
            continue;
        }
        let mut features = Vec::with_capacity(feature_names.len());
        for f in &schema.features {
            let cell = &row[table.column(&f.column)?];
            match f.kind {
                FeatureKind::Continuous | FeatureKind::Encoded => {
                    let v: f64 = cell.parse().map_err(|_| Error::Parse {
                        row: r,
                        column: f.column.clone(),
                        message: format!("`{cell}` is not a number"),
                    })?;
                    if !v.is_finite() {
                        return Err(Error::Parse {
                            row: r,
                            column: f.column.clone(),
                            message: format!("`{cell}` is not finite"),
                        });
                    }
                    features.push(v);
                }
                FeatureKind::Categorical => {
                    let cats = vocab.get(&f.column);
                    let code = category_code(cats, cell, r, &f.column)?;
                    features.extend((0..cats.len()).map(|i| if i == code { 1.0 } else { 0.0 }));
                }
            }
        }
        let mut sensitive = Vec::with_capacity(schema.sensitive.len());
        for s in &schema.sensitive {
            let cell = &row[table.column(&s.column)?];
            sensitive.push(category_code(vocab.get(&s.column), cell, r, &s.column)?);
        }
        let cell = &row[label_idx];
        let label = if schema.label.positive.iter().any(|p| p == cell) {
            1
        } else {
            match &schema.label.negative {
                Some(neg) if !neg.iter().any(|n| n == cell) => {
                    return Err(Error::Parse {
                        row: r,
                        column: schema.label.column.clone(),
                        message: format!("unexpected label `{cell}`"),
                    })
                }
                _ => -1,
            }
        };
        samples.push(Sample {
            features,
            sensitive,
            label,
        });
    }
    if dropped > 0 {
        log::info!("dropped {dropped} rows with missing values");
    }
    Dataset::new(feature_names, continuous, attributes, samples)
}

fn category_code(cats: &[String], cell: &str, row: usize, column: &str) -> Result<usize> {
    cats.iter()
        .position(|c| c == cell)
        .ok_or_else(|| Error::Parse {
            row,
            column: column.into(),
            message: format!("unknown category `{cell}`"),
        })
}

/// Loads, encodes and z-scores a CSV file (statistics fit on this file).
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    Ok(load_csv_raw(path, schema)?.normalized().0)
}

/// Loads and encodes a CSV file, leaving continuous columns as read.
pub fn load_csv_raw(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let table = Table::read(path.as_ref())?;
    let vocab = Vocabulary::fit(schema, &[&table])?;
    encode(&table, schema, &vocab)
}

/// Loads several shards with one shared vocabulary, unnormalized.
pub fn load_csv_shards<P: AsRef<Path>>(paths: &[P], schema: &CsvSchema) -> Result<Vec<Dataset>> {
    let tables = paths
        .iter()
        .map(|p| Table::read(p.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Table> = tables.iter().collect();
    let vocab = Vocabulary::fit(schema, &refs)?;
    tables.iter().map(|t| encode(t, schema, &vocab)).collect()
}

/// Writes `data` as an already-encoded CSV and returns the schema that
/// reloads it (via [`load_csv_raw`]) to an identical dataset.
pub fn write_encoded(data: &Dataset, path: impl AsRef<Path>) -> Result<CsvSchema> {
    let path = path.as_ref();
    let label_col = "label";
    if data.feature_names().iter().any(|n| n == label_col)
        || data.attributes().iter().any(|a| a.name == label_col)
    {
        return Err(Error::Schema("column name `label` is reserved".into()));
    }
    let mut writer = ::csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    header.extend(data.attributes().iter().map(|a| a.name.as_str()));
    header.push(label_col);
    writer.write_record(&header)?;
    for s in data.samples() {
        let mut record: Vec<String> = s.features.iter().map(|v| v.to_string()).collect();
        for (code, attr) in s.sensitive.iter().zip(data.attributes()) {
            record.push(attr.categories[*code].clone());
        }
        record.push(s.label.to_string());
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;

    Ok(CsvSchema {
        label: LabelSpec {
            column: label_col.into(),
            positive: vec!["1".into()],
            negative: Some(vec!["-1".into()]),
        },
        sensitive: data
            .attributes()
            .iter()
            .map(|a| SensitiveSpec {
                column: a.name.clone(),
                name: None,
                categories: Some(a.categories.clone()),
            })
            .collect(),
        features: data
            .feature_names()
            .iter()
            .zip(data.continuous())
            .map(|(name, &cont)| FeatureSpec {
                column: name.clone(),
                kind: if cont {
                    FeatureKind::Continuous
                } else {
                    FeatureKind::Encoded
                },
                categories: None,
            })
            .collect(),
        missing: vec![],
    })
}
