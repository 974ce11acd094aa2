//! One function per subcommand.

use std::path::{Path, PathBuf};

use fairfront_core::data::{split, write_encoded, Dataset, Normalizer};
use fairfront_core::epsfair::{sweep_front, ThresholdOutcome};
use fairfront_core::metrics::{
    compare_fronts, downsample_indices, performance_profile, FrontComparison, FrontMetrics,
    ProfileCurve,
};
use fairfront_core::objectives::ObjectiveSpec;
use fairfront_core::pfsmg::{pfsmg_run, FrontPoint, IterationLog, StopReason};
use fairfront_core::rng;
use fairfront_core::streaming::{
    csv_batches, stream_run, synthetic_batches, StreamConfig, StreamSetup, UpdateRecord,
};
use serde::Serialize;

use crate::config::{resolve_schema, Algorithm, DiagnosticsSplit, RunConfig, StreamSource};
use crate::error::CliError;
use crate::output::{read_front, write_front, write_json};
use crate::timing::{Stopwatch, Timing};

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Context {
    pub out: PathBuf,
    pub workers: usize,
}

impl Context {
    fn prepare_out(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", self.out.display())))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

#[derive(Debug, Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    workers: usize,
}

fn header<'a>(command: &'a str, seed: u64, ctx: &Context) -> Header<'a> {
    Header {
        tool: "fairfront",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        workers: ctx.workers,
    }
}

/// The three splits, normalized with statistics of the training part.
pub struct Prepared {
    pub train: Dataset,
    pub valid: Dataset,
    pub test: Dataset,
    pub normalizer: Option<Normalizer>,
}

impl Prepared {
    pub fn diagnostics(&self, which: DiagnosticsSplit) -> &Dataset {
        match which {
            DiagnosticsSplit::Train => &self.train,
            DiagnosticsSplit::Test => &self.test,
        }
    }
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    let raw = cfg.load_dataset(cfg.seed)?;
    let (train, valid, test) = split(&raw, &cfg.split).map_err(CliError::config)?;
    if train.is_empty() {
        return Err(CliError::Config("the training split is empty".into()));
    }
    if !cfg.normalize {
        return Ok(Prepared {
            train,
            valid,
            test,
            normalizer: None,
        });
    }
    let n = Normalizer::fit(&train);
    Ok(Prepared {
        train: n.apply(&train),
        valid: n.apply(&valid),
        test: n.apply(&test),
        normalizer: Some(n),
    })
}

/// A finished (or partially finished) algorithm run.
#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub points: Vec<FrontPoint>,
    pub grad_evals: u64,
    pub timing: Timing,
    pub details: AlgorithmDetails,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum AlgorithmDetails {
    Pfsmg {
        iterations: usize,
        stop: Option<StopReason>,
        reference: Option<Vec<f64>>,
        history: Vec<IterationLog>,
    },
    Epsfair {
        upper_bound: f64,
        thresholds: Vec<ThresholdOutcome>,
    },
}

/// Rejects objective sets the chosen algorithm cannot handle before any
/// compute starts.
fn check_algorithm(cfg: &RunConfig, algorithm: Algorithm) -> Result<(), CliError> {
    if algorithm == Algorithm::Epsfair {
        let ok = cfg.objectives.len() == 2
            && matches!(cfg.objectives[0], ObjectiveSpec::LogisticLoss { .. })
            && matches!(
                cfg.objectives[1],
                ObjectiveSpec::DiBinary { .. } | ObjectiveSpec::DiMulti { .. }
            );
        if !ok {
            return Err(CliError::Config(
                "epsfair needs exactly (logistic_loss, di_binary | di_multi) objectives".into(),
            ));
        }
    }
    Ok(())
}

pub fn run_algorithm(
    cfg: &RunConfig,
    algorithm: Algorithm,
    train: &Dataset,
) -> Result<AlgorithmRun, CliError> {
    check_algorithm(cfg, algorithm)?;
    let bound = cfg.objective_set()?.bind(train).map_err(CliError::config)?;
    let clock = Stopwatch::start();
    match algorithm {
        Algorithm::Pfsmg => match pfsmg_run(&bound, &cfg.smg, &cfg.pfsmg) {
            Ok(out) => Ok(AlgorithmRun {
                points: out.front.into_points(),
                grad_evals: out.grad_evals,
                timing: clock.stop(),
                details: AlgorithmDetails::Pfsmg {
                    iterations: out.iterations,
                    stop: Some(out.stop),
                    reference: out.reference,
                    history: out.history,
                },
                error: None,
            }),
            Err(fail) => Ok(AlgorithmRun {
                error: Some(fail.to_string()),
                points: fail.partial.into_points(),
                grad_evals: fail.grad_evals,
                timing: clock.stop(),
                details: AlgorithmDetails::Pfsmg {
                    iterations: fail.iteration,
                    stop: None,
                    reference: None,
                    history: Vec::new(),
                },
            }),
        },
        Algorithm::Epsfair => {
            let out = sweep_front(&bound, &cfg.epsfair).map_err(CliError::runtime)?;
            Ok(AlgorithmRun {
                points: out.front.into_points(),
                grad_evals: out.grad_evals,
                timing: clock.stop(),
                details: AlgorithmDetails::Epsfair {
                    upper_bound: out.upper_bound,
                    thresholds: out.thresholds,
                },
                error: None,
            })
        }
    }
}

#[derive(Debug, Serialize)]
struct FrontManifest<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    config: &'a RunConfig,
    algorithm: Algorithm,
    objectives: Vec<String>,
    dim: usize,
    samples: [usize; 3],
    diagnostics_split: DiagnosticsSplit,
    normalizer: Option<&'a Normalizer>,
    front_file: &'a str,
    points: usize,
    grad_evals: u64,
    timing: Timing,
    details: &'a AlgorithmDetails,
    error: Option<&'a str>,
}

/// `front` and `epsfair`: one algorithm on the training split, diagnostics
/// on the configured split.
pub fn cmd_front(cfg: &RunConfig, algorithm: Algorithm, ctx: &Context) -> Result<(), CliError> {
    cfg.validate()?;
    check_algorithm(cfg, algorithm)?;
    let data = prepare(cfg)?;
    ctx.prepare_out()?;
    let run = run_algorithm(cfg, algorithm, &data.train)?;
    log::info!(
        "{algorithm:?}: {} points, {} gradient evaluations, {:.3}s cpu",
        run.points.len(),
        run.grad_evals,
        run.timing.cpu_seconds
    );
    let front_file = "front.csv";
    write_front(
        &ctx.path(front_file),
        &run.points,
        &cfg.objectives,
        data.diagnostics(cfg.diagnostics_split),
    )?;
    let manifest = FrontManifest {
        header: header(
            if algorithm == Algorithm::Pfsmg {
                "front"
            } else {
                "epsfair"
            },
            cfg.seed,
            ctx,
        ),
        config: cfg,
        algorithm,
        objectives: cfg.objectives.iter().map(ObjectiveSpec::label).collect(),
        dim: data.train.feature_dim() + 1,
        samples: [data.train.len(), data.valid.len(), data.test.len()],
        diagnostics_split: cfg.diagnostics_split,
        normalizer: data.normalizer.as_ref(),
        front_file,
        points: run.points.len(),
        grad_evals: run.grad_evals,
        timing: run.timing,
        details: &run.details,
        error: run.error.as_deref(),
    };
    write_json(&ctx.path("manifest.json"), &manifest)?;
    if let AlgorithmDetails::Pfsmg { history, .. } = &run.details {
        write_history(&ctx.path("history.csv"), history)?;
    }
    match run.error {
        Some(e) => Err(CliError::Runtime(e)),
        None => Ok(()),
    }
}

fn write_history(path: &Path, history: &[IterationLog]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(CliError::runtime)?;
    w.write_record([
        "iteration",
        "points",
        "max_iterate_count",
        "hypervolume",
        "grad_evals",
    ])
    .map_err(CliError::runtime)?;
    for h in history {
        w.write_record([
            h.iteration.to_string(),
            h.points.to_string(),
            h.max_iterate_count.to_string(),
            h.hypervolume.map(|v| v.to_string()).unwrap_or_default(),
            h.grad_evals.to_string(),
        ])
        .map_err(CliError::runtime)?;
    }
    w.flush().map_err(CliError::runtime)
}

/// One algorithm's front on one problem, with what it cost.
#[derive(Debug, Clone)]
pub struct AlgorithmFront {
    pub name: String,
    pub values: Vec<Vec<f64>>,
    pub cpu_seconds: Option<f64>,
    pub grad_evals: Option<u64>,
}

/// Per-algorithm entry of a comparison: quality measures of the (possibly
/// downsampled) front plus the cost of producing the full one.
#[derive(Debug, Clone, Serialize)]
pub struct AlgorithmReport {
    #[serde(flatten)]
    pub metrics: FrontMetrics,
    pub front_size: usize,
    pub cpu_per_point: f64,
    pub grad_evals_per_point: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemReport {
    pub problem: usize,
    pub seed: u64,
    pub reference: Vec<f64>,
    pub algorithms: Vec<AlgorithmReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub metric: String,
    pub higher_is_better: bool,
    pub curves: Vec<ProfileCurve>,
}

/// Metrics and profiles for fronts of the same problems.
///
/// `fronts[t]` holds every algorithm's front on problem `t`; all problems must list
/// the same algorithms in the same order. Fronts larger than the smallest
/// one are downsampled to its size before measuring quality.
pub fn compare_problems(
    fronts: &[Vec<AlgorithmFront>],
    seeds: &[u64],
    purity_tolerance: f64,
) -> Result<(Vec<ProblemReport>, Vec<ProfileReport>), CliError> {
    let Some(first) = fronts.first() else {
        return Err(CliError::Config("nothing to compare".into()));
    };
    let names: Vec<String> = first.iter().map(|a| a.name.clone()).collect();
    if names.len() < 2 {
        return Err(CliError::Config(
            "compare needs at least two algorithms".into(),
        ));
    }
    let mut reports = Vec::with_capacity(fronts.len());
    for (t, problem) in fronts.iter().enumerate() {
        let these: Vec<&String> = problem.iter().map(|a| &a.name).collect();
        if these.iter().zip(&names).any(|(a, b)| *a != b) || these.len() != names.len() {
            return Err(CliError::Config(format!(
                "problem {t} lists algorithms {these:?}, expected {names:?}"
            )));
        }
        let target = problem.iter().map(|a| a.values.len()).min().unwrap_or(0);
        let mut measured = Vec::with_capacity(problem.len());
        for AlgorithmFront {
            name, values: f, ..
        } in problem
        {
            let f = if f.len() > target && target >= 2 {
                let keep = downsample_indices(f, target).map_err(CliError::runtime)?;
                keep.iter().map(|&i| f[i].clone()).collect()
            } else {
                f.clone()
            };
            measured.push((name.clone(), f));
        }
        let FrontComparison {
            reference,
            algorithms,
        } = compare_fronts(&measured, purity_tolerance, None).map_err(CliError::runtime)?;
        let algorithms = algorithms
            .into_iter()
            .zip(problem)
            .map(|(mut m, a)| {
                let (f, cpu, grads) = (&a.values, a.cpu_seconds, a.grad_evals);
                m.cpu_seconds = cpu;
                m.grad_evals = grads;
                let size = f.len().max(1) as f64;
                AlgorithmReport {
                    front_size: f.len(),
                    cpu_per_point: cpu.map_or(f64::NAN, |c| c / size),
                    grad_evals_per_point: grads.map_or(f64::NAN, |g| g as f64 / size),
                    metrics: m,
                }
            })
            .collect();
        reports.push(ProblemReport {
            problem: t,
            seed: seeds.get(t).copied().unwrap_or(0),
            reference,
            algorithms,
        });
    }
    let profiles = profiles(&names, &reports)?;
    Ok((reports, profiles))
}

type Extract = fn(&AlgorithmReport) -> f64;

fn profiles(names: &[String], reports: &[ProblemReport]) -> Result<Vec<ProfileReport>, CliError> {
    let metrics: [(&str, bool, Extract); 6] = [
        ("purity", true, |a| a.metrics.purity),
        ("gamma", false, |a| a.metrics.gamma),
        ("delta", false, |a| a.metrics.delta.unwrap_or(f64::INFINITY)),
        ("hypervolume", true, |a| a.metrics.hypervolume),
        ("cpu_per_point", false, |a| a.cpu_per_point),
        ("grad_evals_per_point", false, |a| a.grad_evals_per_point),
    ];
    let mut out = Vec::new();
    for (metric, higher, get) in metrics {
        let table: Vec<Vec<f64>> = reports
            .iter()
            .map(|r| r.algorithms.iter().map(get).collect())
            .collect();
        if table.iter().flatten().any(|v| v.is_nan()) {
            continue;
        }
        let table = if higher {
            table
        } else {
            table
                .into_iter()
                .map(|row| row.into_iter().map(|v| v.max(f64::MIN_POSITIVE)).collect())
                .collect()
        };
        let curves = performance_profile(names, &table, higher).map_err(CliError::runtime)?;
        out.push(ProfileReport {
            metric: metric.to_string(),
            higher_is_better: higher,
            curves,
        });
    }
    Ok(out)
}

fn write_profiles(ctx: &Context, profiles: &[ProfileReport]) -> Result<(), CliError> {
    for p in profiles {
        let path = ctx.path(&format!("profile_{}.csv", p.metric));
        let mut w = csv::Writer::from_path(&path).map_err(CliError::runtime)?;
        w.write_record(["algorithm", "tau", "fraction"])
            .map_err(CliError::runtime)?;
        for c in &p.curves {
            for (tau, frac) in &c.steps {
                w.write_record([c.algorithm.clone(), tau.to_string(), frac.to_string()])
                    .map_err(CliError::runtime)?;
            }
        }
        w.flush().map_err(CliError::runtime)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ComparisonManifest<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    config: &'a RunConfig,
    problems: &'a [ProblemReport],
    profiles: &'a [ProfileReport],
}

/// `compare`: PF-SMG against EPS-fair on `compare.problems` problems, each
/// with its own derived seed.
pub fn cmd_compare(cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    cfg.validate()?;
    check_algorithm(cfg, Algorithm::Epsfair)?;
    ctx.prepare_out()?;
    let mut fronts = Vec::with_capacity(cfg.compare.problems);
    let mut seeds = Vec::with_capacity(cfg.compare.problems);
    for t in 0..cfg.compare.problems {
        let mut c = cfg.clone();
        let seed = rng::derive(cfg.seed, &[t as u64]);
        c.apply_seed(seed);
        let data = prepare(&c)?;
        let mut row = Vec::new();
        for algorithm in [Algorithm::Pfsmg, Algorithm::Epsfair] {
            let run = run_algorithm(&c, algorithm, &data.train)?;
            if let Some(e) = run.error {
                return Err(CliError::Runtime(format!("problem {t}: {e}")));
            }
            if run.points.is_empty() {
                return Err(CliError::Runtime(format!(
                    "problem {t}: {algorithm:?} produced an empty front"
                )));
            }
            let name = match algorithm {
                Algorithm::Pfsmg => "pfsmg",
                Algorithm::Epsfair => "epsfair",
            };
            log::info!(
                "problem {t}: {name} {} points, {:.3}s cpu",
                run.points.len(),
                run.timing.cpu_seconds
            );
            row.push(AlgorithmFront {
                name: name.to_string(),
                values: run.points.into_iter().map(|p| p.f).collect(),
                cpu_seconds: Some(run.timing.cpu_seconds),
                grad_evals: Some(run.grad_evals),
            });
        }
        fronts.push(row);
        seeds.push(seed);
    }
    let (problems, profiles) = compare_problems(&fronts, &seeds, cfg.compare.purity_tolerance)?;
    write_profiles(ctx, &profiles)?;
    write_json(
        &ctx.path("comparison.json"),
        &ComparisonManifest {
            header: header("compare", cfg.seed, ctx),
            config: cfg,
            problems: &problems,
            profiles: &profiles,
        },
    )
}

#[derive(Debug, Serialize)]
struct StreamManifest<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    config: &'a RunConfig,
    reference: &'a [f64],
    snapshots: &'a [String],
    history: &'a [UpdateRecord],
    timing: Timing,
}

/// `stream`: one front snapshot per arriving batch, with diagnostics on the
/// cumulative data.
pub fn cmd_stream(cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    cfg.validate()?;
    let Some(section) = &cfg.stream else {
        return Err(CliError::Config(
            "the stream command needs a `stream` section".into(),
        ));
    };
    let setup = StreamSetup {
        objectives: cfg.objective_set()?,
        smg: cfg.smg.clone(),
        pfsmg: cfg.pfsmg.clone(),
        stream: StreamConfig {
            start_count: section.start_count,
        },
    };
    let batches = match &section.source {
        StreamSource::Synthetic { total, batch_size } => {
            let mut synth = cfg.synthetic.clone();
            synth.n = *total;
            synthetic_batches(&synth, *batch_size, cfg.seed).map_err(CliError::config)?
        }
        StreamSource::CsvShards {
            dir,
            schema,
            schema_path,
        } => {
            let schema = resolve_schema(schema, schema_path)?;
            csv_batches(dir, &schema).map_err(CliError::config)?
        }
    };
    let dir = ctx.path("stream");
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let clock = Stopwatch::start();
    let mut snapshots = Vec::new();
    let mut write_err = None;
    let result = stream_run(batches.into_iter().map(Ok), &setup, |state| {
        let u = state.history().len() - 1;
        let name = format!("stream/front_{u:03}.csv");
        if let Err(e) = write_front(
            &ctx.path(&name),
            state.front().points(),
            &cfg.objectives,
            state.data(),
        ) {
            let msg = e.to_string();
            write_err = Some(e);
            return Err(fairfront_core::Error::InvalidInput(msg));
        }
        if let Some(r) = state.history().last() {
            log::info!(
                "update {u}: {} samples, {} points, hypervolume {}",
                r.samples,
                r.points,
                r.hypervolume
            );
        }
        snapshots.push(name);
        Ok(())
    });
    if let Some(e) = write_err {
        return Err(e);
    }
    let state = result.map_err(CliError::runtime)?;
    write_json(
        &ctx.path("manifest.json"),
        &StreamManifest {
            header: header("stream", cfg.seed, ctx),
            config: cfg,
            reference: state.reference(),
            snapshots: &snapshots,
            history: state.history(),
            timing: clock.stop(),
        },
    )
}

#[derive(Debug, Serialize)]
struct DataManifest<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    data_file: &'a str,
    schema_file: &'a str,
    rows: usize,
    features: usize,
    positives: usize,
    groups: Vec<(String, Vec<(String, usize)>)>,
}

fn write_dataset(
    ctx: &Context,
    command: &str,
    seed: u64,
    name: &str,
    data: &Dataset,
) -> Result<(), CliError> {
    ctx.prepare_out()?;
    let data_file = format!("{name}.csv");
    let schema_file = format!("{name}.schema.json");
    let schema = write_encoded(data, ctx.path(&data_file)).map_err(CliError::runtime)?;
    write_json(&ctx.path(&schema_file), &schema)?;
    let groups = data
        .attributes()
        .iter()
        .enumerate()
        .map(|(a, attr)| {
            let counts = data.group_counts(a);
            (
                attr.name.clone(),
                attr.categories.iter().cloned().zip(counts).collect(),
            )
        })
        .collect();
    write_json(
        &ctx.path(&format!("{name}.manifest.json")),
        &DataManifest {
            header: header(command, seed, ctx),
            data_file: &data_file,
            schema_file: &schema_file,
            rows: data.len(),
            features: data.feature_dim(),
            positives: data.positive_count(),
            groups,
        },
    )
}

/// `synth`: the configured synthetic dataset, unnormalized.
pub fn cmd_synth(cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    let data = cfg.synthetic.generate(cfg.seed).map_err(CliError::config)?;
    write_dataset(ctx, "synth", cfg.seed, "synthetic", &data)
}

/// `preprocess-adult`: the cleaned, encoded Adult table from the raw UCI files.
pub fn cmd_preprocess_adult(input: &Path, ctx: &Context) -> Result<(), CliError> {
    let data = fairfront_core::data::preprocess_adult_raw(input).map_err(CliError::config)?;
    write_dataset(ctx, "preprocess-adult", 0, "adult", &data)
}

/// `preprocess-compas`: the filtered, encoded COMPAS table.
pub fn cmd_preprocess_compas(input: &Path, ctx: &Context) -> Result<(), CliError> {
    let data = fairfront_core::data::load_compas_raw(input).map_err(CliError::config)?;
    write_dataset(ctx, "preprocess-compas", 0, "compas", &data)
}

/// `metrics`: quality measures of existing front files, treated as fronts
/// of one problem.
pub fn cmd_metrics(
    fronts: &[PathBuf],
    names: &[String],
    purity_tolerance: f64,
    reference: Option<Vec<f64>>,
    ctx: &Context,
) -> Result<(), CliError> {
    if fronts.len() < 2 {
        return Err(CliError::Config(
            "metrics needs at least two --front files".into(),
        ));
    }
    if !names.is_empty() && names.len() != fronts.len() {
        return Err(CliError::Config(format!(
            "{} names for {} fronts",
            names.len(),
            fronts.len()
        )));
    }
    let mut sets = Vec::with_capacity(fronts.len());
    for (i, path) in fronts.iter().enumerate() {
        let file = read_front(path)?;
        let name = names
            .get(i)
            .cloned()
            .unwrap_or_else(|| path.display().to_string());
        sets.push((name, file.f));
    }
    let m = sets[0].1.first().map_or(0, Vec::len);
    if sets.iter().flat_map(|s| &s.1).any(|f| f.len() != m) {
        return Err(CliError::Config(
            "fronts have different objective counts".into(),
        ));
    }
    if let Some(r) = &reference {
        if r.len() != m {
            return Err(CliError::Config(format!(
                "reference has {} coordinates, fronts have {m}",
                r.len()
            )));
        }
    }
    ctx.prepare_out()?;
    let report = compare_fronts(&sets, purity_tolerance, reference).map_err(CliError::runtime)?;
    write_json(&ctx.path("metrics.json"), &report)
}
