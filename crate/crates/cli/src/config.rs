//! The JSON run configuration.

use std::path::{Path, PathBuf};

use fairfront_core::data::{
    load_compas_raw, load_csv_raw, preprocess_adult_raw, CsvSchema, Dataset, SplitSpec,
    SyntheticConfig,
};
use fairfront_core::epsfair::EpsSweepConfig;
use fairfront_core::objectives::{ObjectiveSet, ObjectiveSpec};
use fairfront_core::pfsmg::PfsmgConfig;
use fairfront_core::smg::SmgConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    Pfsmg,
    Epsfair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticsSplit {
    Train,
    #[default]
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    #[default]
    /// Generated from the top-level `synthetic` section and the run seed.
    Synthetic,
    Csv {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<CsvSchema>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema_path: Option<PathBuf>,
    },
    /// Directory holding the UCI `adult.data` and `adult.test` files.
    Adult { dir: PathBuf },
    /// ProPublica `compas-scores-two-years-violent.csv`.
    Compas { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StreamSource {
    /// `total` synthetic samples in chunks of `batch_size`.
    Synthetic { total: usize, batch_size: usize },
    /// CSV shards in a directory, consumed in lexicographic order.
    CsvShards {
        dir: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<CsvSchema>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema_path: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamSection {
    #[serde(default = "default_start_count")]
    pub start_count: usize,
    pub source: StreamSource,
}

fn default_start_count() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    /// Number of problems; problem `t` uses a seed derived from the run seed.
    pub problems: usize,
    pub purity_tolerance: f64,
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection {
            problems: 40,
            purity_tolerance: 0.0,
        }
    }
}

fn default_objectives() -> Vec<ObjectiveSpec> {
    vec![
        ObjectiveSpec::LogisticLoss { lambda_reg: 0.0 },
        ObjectiveSpec::DiBinary {
            attribute: "a".into(),
        },
    ]
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub synthetic: SyntheticConfig,
    /// Z-score continuous features with statistics fit on the training split.
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default)]
    pub split: SplitSpec,
    #[serde(default = "default_objectives")]
    pub objectives: Vec<ObjectiveSpec>,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default)]
    pub smg: SmgConfig,
    #[serde(default)]
    pub pfsmg: PfsmgConfig,
    #[serde(default)]
    pub epsfair: EpsSweepConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stream: Option<StreamSection>,
    #[serde(default)]
    pub compare: CompareSection,
    #[serde(default)]
    pub diagnostics_split: DiagnosticsSplit,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl RunConfig {
    /// Reads a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg =
            Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self.dataset {
            DatasetSpec::Synthetic => {}
            DatasetSpec::Csv {
                path, schema_path, ..
            } => {
                fix(path);
                if let Some(s) = schema_path {
                    fix(s);
                }
            }
            DatasetSpec::Adult { dir } => fix(dir),
            DatasetSpec::Compas { path } => fix(path),
        }
        if let Some(StreamSection {
            source: StreamSource::CsvShards {
                dir, schema_path, ..
            },
            ..
        }) = &mut self.stream
        {
            fix(dir);
            if let Some(s) = schema_path {
                fix(s);
            }
        }
    }

    /// Copies the run seed into every seeded section.
    pub fn apply_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.pfsmg.seed = seed;
        self.split.seed = seed;
    }

    pub fn objective_set(&self) -> Result<ObjectiveSet, CliError> {
        ObjectiveSet::new(self.objectives.clone()).map_err(CliError::config)
    }

    /// Checks everything that can be checked without touching data.
    pub fn validate(&self) -> Result<(), CliError> {
        let set = self.objective_set()?;
        self.smg.validate(set.len()).map_err(CliError::config)?;
        self.pfsmg.validate().map_err(CliError::config)?;
        self.epsfair.validate().map_err(CliError::config)?;
        self.split.validate().map_err(CliError::config)?;
        if self.compare.problems == 0 {
            return Err(CliError::Config("compare.problems must be >= 1".into()));
        }
        if let Some(s) = &self.stream {
            if s.start_count == 0 {
                return Err(CliError::Config("stream.start_count must be >= 1".into()));
            }
            if let StreamSource::Synthetic { total, batch_size } = s.source {
                if total == 0 || batch_size == 0 {
                    return Err(CliError::Config(
                        "stream source needs positive total and batch_size".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Loads the configured dataset, unnormalized.
    pub fn load_dataset(&self, seed: u64) -> Result<Dataset, CliError> {
        match &self.dataset {
            DatasetSpec::Synthetic => self.synthetic.generate(seed).map_err(CliError::config),
            DatasetSpec::Csv {
                path,
                schema,
                schema_path,
            } => {
                let schema = resolve_schema(schema, schema_path)?;
                load_csv_raw(path, &schema).map_err(CliError::config)
            }
            DatasetSpec::Adult { dir } => preprocess_adult_raw(dir).map_err(CliError::config),
            DatasetSpec::Compas { path } => load_compas_raw(path).map_err(CliError::config),
        }
    }
}

pub fn resolve_schema(
    inline: &Option<CsvSchema>,
    path: &Option<PathBuf>,
) -> Result<CsvSchema, CliError> {
    match (inline, path) {
        (Some(s), None) => Ok(s.clone()),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
        _ => Err(CliError::Config(
            "give exactly one of `schema` and `schema_path`".into(),
        )),
    }
}
