//! UCI Adult Income preprocessing.

use std::path::Path;

use super::csv::{encode, CsvSchema, FeatureSpec, LabelSpec, SensitiveSpec, Table, Vocabulary};
use super::Dataset;
use crate::error::{Error, Result};

const COLUMNS: [&str; 15] = [
    "age",
    "workclass",
    "fnlwgt",
    "education",
    "education-num",
    "marital-status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "capital-gain",
    "capital-loss",
    "hours-per-week",
    "native-country",
    "income",
];

pub(crate) const RACES: [&str; 5] = [
    "White",
    "Black",
    "Asian-Pac-Islander",
    "Amer-Indian-Eskimo",
    "Other",
];

fn schema() -> CsvSchema {
    CsvSchema {
        label: LabelSpec {
            column: "income".into(),
            positive: vec![">50K".into()],
            negative: Some(vec!["<=50K".into()]),
        },
        sensitive: vec![
            SensitiveSpec {
                column: "sex".into(),
                name: Some("gender".into()),
                categories: Some(vec!["Male".into(), "Female".into()]),
            },
            SensitiveSpec {
                column: "race".into(),
                name: None,
                categories: Some(RACES.iter().map(|r| r.to_string()).collect()),
            },
        ],
        features: vec![
            FeatureSpec::continuous("age"),
            FeatureSpec::categorical("workclass"),
            FeatureSpec::categorical("education"),
            FeatureSpec::continuous("education-num"),
            FeatureSpec::categorical("marital-status"),
            FeatureSpec::categorical("occupation"),
            FeatureSpec::categorical("relationship"),
            FeatureSpec::continuous("capital-gain"),
            FeatureSpec::continuous("capital-loss"),
            FeatureSpec::continuous("hours-per-week"),
            FeatureSpec::categorical("native-country"),
        ],
        missing: vec!["?".into(), String::new()],
    }
}

fn merge_education(level: &str) -> &str {
    match level {
        "Preschool" | "1st-4th" | "5th-6th" | "7th-8th" => "Preschool-8th",
        "9th" | "10th" | "11th" | "12th" => "9th-12th",
        other => other,
    }
}

fn read_raw(path: &Path, rows: &mut Vec<Vec<String>>) -> Result<()> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_path(path)?;
    for record in reader.records() {
        let record = record?;
        // adult.test opens with a one-field banner line; blank lines also end up here.
        if record.len() != COLUMNS.len() {
            continue;
        }
        let mut row: Vec<String> = record.iter().map(str::to_string).collect();
        if let Some(label) = row[14].strip_suffix('.') {
            row[14] = label.to_string();
        }
        row[3] = merge_education(&row[3]).to_string();
        if row[13] != "?" {
            row[13] = if row[13] == "United-States" {
                "US"
            } else {
                "non-US"
            }
            .into();
        }
        rows.push(row);
    }
    Ok(())
}

/// Adult Income from `adult.data` + `adult.test`, encoded but not normalized.
///
/// Exposes `gender` (Male, Female) and `race` (K=5) as sensitive attributes;
/// neither is used as a feature.
pub fn preprocess_adult_raw(raw_dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = raw_dir.as_ref();
    let mut table = Table {
        headers: COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows: Vec::new(),
    };
    for name in ["adult.data", "adult.test"] {
        let path = dir.join(name);
        if !path.exists() {
            return Err(Error::DatasetMissing {
                path,
                hint: "download adult.data and adult.test from the UCI Machine Learning \
                       Repository (https://archive.ics.uci.edu/dataset/2/adult) into this \
                       directory"
                    .into(),
            });
        }
        read_raw(&path, &mut table.rows)?;
    }
    let schema = schema();
    let vocab = Vocabulary::fit(&schema, &[&table])?;
    encode(&table, &schema, &vocab)
}

/// [`preprocess_adult_raw`] followed by z-scoring the continuous columns.
pub fn preprocess_adult(raw_dir: impl AsRef<Path>) -> Result<Dataset> {
    Ok(preprocess_adult_raw(raw_dir)?.normalized().0)
}
