use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fairfront_core::data::generate_synthetic;
use fairfront_core::metrics::hypervolume;
use fairfront_core::objectives::{ObjectiveSet, ObjectiveSpec};
use fairfront_core::pfsmg::{nondominated_indices, pfsmg_run, PfsmgConfig};
use fairfront_core::rng;
use fairfront_core::smg::{solve_minnorm, SmgConfig};
use fairfront_core::MultiObjective;
use rand::Rng;

fn objectives() -> ObjectiveSet {
    ObjectiveSet::new(vec![
        ObjectiveSpec::LogisticLoss { lambda_reg: 0.0 },
        ObjectiveSpec::DiBinary {
            attribute: "a".into(),
        },
        ObjectiveSpec::EqualOppFnr {
            attribute: "a".into(),
            beta: 8.0,
        },
    ])
    .unwrap()
}

fn random_points(n: usize, m: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut g = rng::seeded(seed);
    (0..n)
        .map(|_| (0..m).map(|_| g.random::<f64>()).collect())
        .collect()
}

/// Points on the simplex face `sum f = 1`, all mutually nondominated.
fn simplex_front(n: usize, m: usize, seed: u64) -> Vec<Vec<f64>> {
    random_points(n, m, seed)
        .into_iter()
        .map(|p| {
            let s: f64 = p.iter().sum();
            p.iter().map(|v| v / s).collect()
        })
        .collect()
}

fn bench_gradients(c: &mut Criterion) {
    let (data, _) = generate_synthetic(2000, 1).unwrap().normalized();
    let set = objectives();
    let bound = set.bind(&data).unwrap();
    let x = vec![0.3, -0.2, 0.1];
    let batch: Vec<usize> = (0..80).collect();
    let mut group = c.benchmark_group("gradient");
    for (i, name) in ["logistic", "di_binary", "equal_opp_fnr"]
        .iter()
        .enumerate()
    {
        group.bench_function(BenchmarkId::new(*name, "full"), |b| {
            b.iter(|| bound.gradient(i, black_box(&x), None))
        });
        group.bench_function(BenchmarkId::new(*name, "batch80"), |b| {
            b.iter(|| bound.gradient(i, black_box(&x), Some(&batch)))
        });
    }
    group.finish();
}

fn bench_minnorm(c: &mut Criterion) {
    let mut group = c.benchmark_group("minnorm");
    for m in [2usize, 3] {
        let grads = random_points(m, 10, m as u64);
        group.bench_with_input(BenchmarkId::from_parameter(m), &grads, |b, g| {
            b.iter(|| solve_minnorm(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn bench_filter(c: &mut Criterion) {
    let mut group = c.benchmark_group("nondominated");
    for m in [2usize, 3] {
        for n in [300usize, 3000] {
            let pts = random_points(n, m, 7);
            group.bench_with_input(BenchmarkId::new(format!("m{m}"), n), &pts, |b, p| {
                b.iter(|| nondominated_indices(black_box(p)))
            });
        }
    }
    group.finish();
}

fn bench_hypervolume(c: &mut Criterion) {
    let mut group = c.benchmark_group("hypervolume");
    for m in [2usize, 3] {
        let front = simplex_front(500, m, 3);
        let reference = vec![1.1; m];
        group.bench_with_input(BenchmarkId::new(format!("m{m}"), 500), &front, |b, f| {
            b.iter(|| hypervolume(black_box(f), &reference).unwrap())
        });
    }
    group.finish();
}

fn bench_pfsmg(c: &mut Criterion) {
    let (data, _) = generate_synthetic(1200, 1).unwrap().normalized();
    let set = ObjectiveSet::new(objectives().specs()[..2].to_vec()).unwrap();
    let bound = set.bind(&data).unwrap();
    let cfg = PfsmgConfig {
        iterate_budget: 10,
        ..PfsmgConfig::default()
    };
    let mut group = c.benchmark_group("pfsmg");
    group.sample_size(10);
    group.bench_function("synthetic_1200_budget10", |b| {
        b.iter(|| pfsmg_run(&bound, &SmgConfig::default(), black_box(&cfg)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_gradients,
    bench_minnorm,
    bench_filter,
    bench_hypervolume,
    bench_pfsmg
);
criterion_main!(benches);
