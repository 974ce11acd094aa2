//! ProPublica COMPAS (two-year recidivism) loader.
//!
//! Keeps Black and White defendants. Features: sex, age, prior-offense count,
//! charge degree. The positive label (+1) is "did not reoffend". When the
//! standard screening columns are present the usual ProPublica filters apply:
//! screening within 30 days of arrest, a known recidivism outcome, and no
//! ordinary-traffic charges.

use std::path::Path;

use super::csv::{encode, CsvSchema, FeatureSpec, LabelSpec, SensitiveSpec, Table, Vocabulary};
use super::Dataset;
use crate::error::{Error, Result};

fn schema() -> CsvSchema {
    CsvSchema {
        label: LabelSpec {
            column: "two_year_recid".into(),
            positive: vec!["0".into()],
            negative: Some(vec!["1".into()]),
        },
        sensitive: vec![SensitiveSpec {
            column: "race".into(),
            name: None,
            categories: Some(vec!["White".into(), "Black".into()]),
        }],
        features: vec![
            FeatureSpec::categorical("sex"),
            FeatureSpec::continuous("age"),
            FeatureSpec::continuous("priors_count"),
            FeatureSpec::categorical("c_charge_degree"),
        ],
        missing: vec![String::new()],
    }
}

fn keep(table: &Table, row: &[String]) -> bool {
    let get = |name: &str| table.column(name).ok().map(|i| row[i].as_str());
    if let Some(days) = get("days_b_screening_arrest") {
        match days.parse::<f64>() {
            Ok(v) if (-30.0..=30.0).contains(&v) => {}
            _ => return false,
        }
    }
    if get("is_recid") == Some("-1") {
        return false;
    }
    if get("c_charge_degree") == Some("O") {
        return false;
    }
    if get("score_text") == Some("N/A") {
        return false;
    }
    true
}

/// COMPAS restricted to Black/White defendants, encoded but not normalized.
pub fn load_compas_raw(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::DatasetMissing {
            path: path.to_path_buf(),
            hint: "download compas-scores-two-years-violent.csv from \
                   https://github.com/propublica/compas-analysis"
                .into(),
        });
    }
    let mut table = Table::read(path)?;
    let race = table.column("race")?;
    let rows = std::mem::take(&mut table.rows);
    table.rows = rows
        .into_iter()
        .filter(|row| keep(&table, row))
        .filter_map(|mut row| {
            let mapped = match row[race].as_str() {
                "Caucasian" | "White" => "White",
                "African-American" | "Black" => "Black",
                _ => return None,
            };
            row[race] = mapped.to_string();
            Some(row)
        })
        .collect();
    let schema = schema();
    let vocab = Vocabulary::fit(&schema, &[&table])?;
    encode(&table, &schema, &vocab)
}

/// [`load_compas_raw`] followed by z-scoring the continuous columns.
pub fn load_compas(path: impl AsRef<Path>) -> Result<Dataset> {
    Ok(load_compas_raw(path)?.normalized().0)
}
