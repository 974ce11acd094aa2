//! Pareto fronts under arriving data batches.
//!
//! Raw data accumulates across updates and is re-normalized on the
//! cumulative set each time. Each update re-evaluates the current front,
//! maps every point to the refreshed normalization so it still represents
//! the same classifier, and warm-starts PF-SMG from a downsampled subset.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{load_csv_shards, CsvSchema, Dataset, Normalizer, SyntheticConfig};
use crate::error::{Error, Result};
use crate::metrics::{downsample, hypervolume_clipped, reference_point};
use crate::objectives::ObjectiveSet;
use crate::pfsmg::{
    density_thin, filter_nondominated, pfsmg_run, pfsmg_run_from, FrontPoint, ParetoFront,
    PfsmgConfig, PfsmgOutput,
};
use crate::problem::MultiObjective;
use crate::smg::SmgConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StreamConfig {
    /// Front points seeding each warm start.
    pub start_count: usize,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig { start_count: 5 }
    }
}

/// Everything an update needs besides the data.
#[derive(Debug, Clone)]
pub struct StreamSetup {
    pub objectives: ObjectiveSet,
    pub smg: SmgConfig,
    /// Used for the cold start and, with iterate counts reset, for each
    /// warm-started update.
    pub pfsmg: PfsmgConfig,
    pub stream: StreamConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateRecord {
    pub update: usize,
    pub samples: usize,
    pub points: usize,
    pub hypervolume: f64,
    pub grad_evals: u64,
}

#[derive(Debug, Clone)]
pub struct StreamState {
    raw: Dataset,
    data: Dataset,
    normalizer: Normalizer,
    front: ParetoFront,
    reference: Vec<f64>,
    history: Vec<UpdateRecord>,
}

impl StreamState {
    /// Cold PF-SMG run on the first batch; fixes the hypervolume reference.
    pub fn start(first: Dataset, setup: &StreamSetup) -> Result<StreamState> {
        if first.is_empty() {
            return Err(Error::invalid("the first stream batch is empty"));
        }
        let (data, normalizer) = first.normalized();
        let out = {
            let bound = setup.objectives.bind(&data)?;
            let cfg = update_config(&setup.pfsmg, 0);
            finish(pfsmg_run(&bound, &setup.smg, &cfg))?
        };
        let reference = reference_point(&out.front.objective_values())?;
        let hypervolume = hypervolume_clipped(&out.front.objective_values(), &reference)?;
        let record = UpdateRecord {
            update: 0,
            samples: data.len(),
            points: out.front.len(),
            hypervolume,
            grad_evals: out.grad_evals,
        };
        log::info!(
            "stream update 0: {} samples, {} points, hypervolume {hypervolume}",
            data.len(),
            out.front.len()
        );
        Ok(StreamState {
            raw: first,
            data,
            normalizer,
            front: out.front,
            reference,
            history: vec![record],
        })
    }

    /// Appends `batch`, re-evaluates the front on the cumulative data and
    /// warm-starts PF-SMG from `start_count` of its points. The re-evaluated
    /// previous front is merged into the result.
    pub fn update(&mut self, batch: &Dataset, setup: &StreamSetup) -> Result<()> {
        let raw = self.raw.concat(batch)?;
        let (data, normalizer) = raw.normalized();
        let update = self.history.len();
        let (front, grad_evals) = {
            let bound = setup.objectives.bind(&data)?;
            let previous = self
                .front
                .points()
                .iter()
                .map(|p| {
                    let x = renormalize(&p.x, &self.normalizer, &normalizer);
                    let f = bound.values(&x)?;
                    Ok(FrontPoint {
                        x,
                        f,
                        iterate_count: 0,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let previous = filter_nondominated(previous);
            let count = setup.stream.start_count.min(previous.len());
            let seeds = if count >= 2 {
                downsample(&previous, count)?
            } else {
                previous.clone()
            };
            let start: Vec<Vec<f64>> = seeds.points().iter().map(|p| p.x.clone()).collect();
            let cfg = update_config(&setup.pfsmg, update);
            let out = finish(pfsmg_run_from(&bound, &setup.smg, &cfg, start))?;

            let mut merged = out.front.into_points();
            merged.extend(previous.into_points());
            let mut front = filter_nondominated(merged);
            if setup.pfsmg.cell_fraction > 0.0 {
                front = density_thin(&front, setup.pfsmg.cell_fraction);
            }
            (front, out.grad_evals)
        };

        let hypervolume = hypervolume_clipped(&front.objective_values(), &self.reference)?;
        log::info!(
            "stream update {update}: {} samples, {} points, hypervolume {hypervolume}",
            data.len(),
            front.len()
        );
        self.history.push(UpdateRecord {
            update,
            samples: data.len(),
            points: front.len(),
            hypervolume,
            grad_evals,
        });
        self.raw = raw;
        self.data = data;
        self.normalizer = normalizer;
        self.front = front;
        Ok(())
    }

    /// Cumulative data, normalized.
    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn raw(&self) -> &Dataset {
        &self.raw
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    pub fn front(&self) -> &ParetoFront {
        &self.front
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn history(&self) -> &[UpdateRecord] {
        &self.history
    }
}

fn finish(
    out: std::result::Result<PfsmgOutput, crate::pfsmg::PfsmgFailure>,
) -> Result<PfsmgOutput> {
    out.map_err(|f| {
        log::error!(
            "{f}; {} points were kept before the failure",
            f.partial.len()
        );
        f.source
    })
}

/// The cold start uses the configured seed; later updates derive their own.
fn update_config(base: &PfsmgConfig, update: usize) -> PfsmgConfig {
    if update == 0 {
        return base.clone();
    }
    PfsmgConfig {
        seed: crate::rng::derive(base.seed, &[update as u64]),
        ..base.clone()
    }
}

/// Parameters that give the same decision function under `new` as `x` does
/// under `old`.
pub fn renormalize(x: &[f64], old: &Normalizer, new: &Normalizer) -> Vec<f64> {
    let mut out = x.to_vec();
    let b = out.len() - 1;
    for (k, &col) in old.columns.iter().enumerate() {
        let (mo, so) = (old.mean[k], old.std[k]);
        let (mn, sn) = (new.mean[k], new.std[k]);
        if so == 0.0 {
            // the old column was constant zero and carried no weight
            out[col] = 0.0;
            continue;
        }
        let c = x[col];
        out[col] = c * sn / so;
        out[b] += c * (mn - mo) / so;
    }
    out
}

/// Runs a whole stream, calling `snapshot` after the cold start and after
/// every update.
pub fn stream_run<I, F>(batches: I, setup: &StreamSetup, mut snapshot: F) -> Result<StreamState>
where
    I: IntoIterator<Item = Result<Dataset>>,
    F: FnMut(&StreamState) -> Result<()>,
{
    let mut batches = batches.into_iter();
    let first = batches
        .next()
        .ok_or_else(|| Error::invalid("a stream needs at least one batch"))??;
    let mut state = StreamState::start(first, setup)?;
    snapshot(&state)?;
    for batch in batches {
        state.update(&batch?, setup)?;
        snapshot(&state)?;
    }
    Ok(state)
}

/// CSV files directly inside `dir`, in lexicographic order.
pub fn shard_paths(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file()
            && path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Error::invalid(format!(
            "no CSV shards in {}",
            dir.display()
        )));
    }
    Ok(paths)
}

/// Unnormalized batches from the CSV shards in `dir`.
pub fn csv_batches(dir: impl AsRef<Path>, schema: &CsvSchema) -> Result<Vec<Dataset>> {
    load_csv_shards(&shard_paths(dir)?, schema)
}

/// `config.n` synthetic samples cut into consecutive batches of
/// `batch_size` (the last one may be short).
pub fn synthetic_batches(
    config: &SyntheticConfig,
    batch_size: usize,
    seed: u64,
) -> Result<Vec<Dataset>> {
    if batch_size == 0 {
        return Err(Error::invalid("stream batch size must be >= 1"));
    }
    let data = config.generate(seed)?;
    let idx: Vec<usize> = (0..data.len()).collect();
    Ok(idx.chunks(batch_size).map(|c| data.subset(c)).collect())
}
