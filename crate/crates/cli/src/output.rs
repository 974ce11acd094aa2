//! Front CSV files and JSON manifests.

use std::path::Path;

use fairfront_core::data::Dataset;
use fairfront_core::model::LinearModel;
use fairfront_core::objectives::{fnr_rates, positive_rates, ObjectiveSpec};
use fairfront_core::pfsmg::FrontPoint;
use serde::Serialize;

use crate::error::CliError;

/// Fairness attributes named by the objectives, in first-use order, and
/// whether an equal-opportunity objective uses each one.
fn diagnosed_attributes(specs: &[ObjectiveSpec]) -> Vec<(String, bool)> {
    let mut out: Vec<(String, bool)> = Vec::new();
    for s in specs {
        let Some(a) = s.attribute() else { continue };
        let fnr = matches!(s, ObjectiveSpec::EqualOppFnr { .. });
        match out.iter_mut().find(|(n, _)| n == a) {
            Some(entry) => entry.1 |= fnr,
            None => out.push((a.to_string(), fnr)),
        }
    }
    out
}

/// Header of a front file: parameters, objectives, then diagnostics.
///
/// The first fairness attribute reports `cv_score` (and `cv_fnr` when an
/// equal-opportunity objective uses it); further attributes get suffixed
/// columns. Per-group rates follow as `rate_<attr>_<group>` and
/// `fnr_<attr>_<group>`.
pub fn front_header(d: usize, m: usize, specs: &[ObjectiveSpec], data: &Dataset) -> Vec<String> {
    let mut h: Vec<String> = (0..d).map(|i| format!("c_{i}")).collect();
    h.push("b".into());
    h.extend((1..=m).map(|i| format!("f_{i}")));
    h.push("accuracy".into());
    let attrs = diagnosed_attributes(specs);
    for (i, (name, fnr)) in attrs.iter().enumerate() {
        let suffix = if i == 0 {
            String::new()
        } else {
            format!("_{name}")
        };
        h.push(format!("cv_score{suffix}"));
        if *fnr {
            h.push(format!("cv_fnr{suffix}"));
        }
    }
    for (name, fnr) in &attrs {
        if let Ok(a) = data.attribute_index(name) {
            for g in &data.attributes()[a].categories {
                h.push(format!("rate_{name}_{g}"));
            }
            if *fnr {
                for g in &data.attributes()[a].categories {
                    h.push(format!("fnr_{name}_{g}"));
                }
            }
        }
    }
    h
}

fn row(point: &FrontPoint, specs: &[ObjectiveSpec], data: &Dataset) -> Result<Vec<f64>, CliError> {
    let model = LinearModel::from_params(&point.x).map_err(CliError::runtime)?;
    let mut r = point.x.clone();
    r.extend(&point.f);
    r.push(model.accuracy(data).map_err(CliError::runtime)?);
    let attrs = diagnosed_attributes(specs);
    let mut rates = Vec::new();
    for (name, fnr) in &attrs {
        let a = data.attribute_index(name).map_err(CliError::runtime)?;
        let (pr, cv) = positive_rates(&model, data, a).map_err(CliError::runtime)?;
        r.push(cv);
        rates.extend(pr);
        if *fnr {
            let (fr, cv_fnr) = fnr_rates(&model, data, a).map_err(CliError::runtime)?;
            r.push(cv_fnr);
            rates.extend(fr);
        }
    }
    r.extend(rates);
    Ok(r)
}

/// Writes a front with diagnostics evaluated on `data`, rows ordered by the
/// objective vectors.
pub fn write_front(
    path: &Path,
    points: &[FrontPoint],
    specs: &[ObjectiveSpec],
    data: &Dataset,
) -> Result<(), CliError> {
    let d = data.feature_dim();
    let m = specs.len();
    let mut sorted: Vec<&FrontPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        a.f.iter()
            .zip(&b.f)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    w.write_record(front_header(d, m, specs, data))
        .map_err(CliError::runtime)?;
    for p in sorted {
        let values = row(p, specs, data)?;
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Runtime(format!(
                "non-finite value {bad} in front row"
            )));
        }
        w.write_record(values.iter().map(|v| v.to_string()))
            .map_err(CliError::runtime)?;
    }
    w.flush().map_err(CliError::runtime)?;
    Ok(())
}

/// Parameter vectors and objective values read back from a front file.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontFile {
    pub header: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
}

pub fn read_front(path: &Path) -> Result<FrontFile, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let header: Vec<String> = r
        .headers()
        .map_err(CliError::config)?
        .iter()
        .map(str::to_string)
        .collect();
    let params: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("c_") || *h == "b")
        .map(|(i, _)| i)
        .collect();
    let objectives: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("f_"))
        .map(|(i, _)| i)
        .collect();
    if objectives.is_empty() {
        return Err(CliError::Config(format!(
            "{}: no objective columns (f_1, f_2, ...)",
            path.display()
        )));
    }
    let mut x = Vec::new();
    let mut f = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(CliError::config)?;
        let parse = |i: usize| -> Result<f64, CliError> {
            rec[i].parse::<f64>().map_err(|e| {
                CliError::Config(format!(
                    "{} row {line}, column {}: {e}",
                    path.display(),
                    header[i]
                ))
            })
        };
        x.push(params.iter().map(|&i| parse(i)).collect::<Result<_, _>>()?);
        f.push(
            objectives
                .iter()
                .map(|&i| parse(i))
                .collect::<Result<_, _>>()?,
        );
    }
    Ok(FrontFile { header, x, f })
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(CliError::runtime)?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
