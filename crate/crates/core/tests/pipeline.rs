use fairfront_core::data::{generate_synthetic, load_csv_raw, split, write_encoded, SplitSpec};
use fairfront_core::epsfair::{sweep_front, EpsSweepConfig};
use fairfront_core::metrics::{compare_fronts, downsample};
use fairfront_core::objectives::{ObjectiveSet, ObjectiveSpec};
use fairfront_core::pfsmg::{dominates, pfsmg_run, PfsmgConfig};
use fairfront_core::smg::SmgConfig;
use fairfront_core::streaming::{stream_run, synthetic_batches, StreamConfig, StreamSetup};
use fairfront_core::MultiObjective;

fn bi_objective() -> ObjectiveSet {
    ObjectiveSet::new(vec![
        ObjectiveSpec::LogisticLoss { lambda_reg: 0.0 },
        ObjectiveSpec::DiBinary {
            attribute: "a".into(),
        },
    ])
    .unwrap()
}

fn small_pfsmg(seed: u64) -> PfsmgConfig {
    PfsmgConfig {
        iterate_budget: 16,
        point_budget: 300,
        seed,
        ..PfsmgConfig::default()
    }
}

#[test]
fn encoded_csv_reloads_identically() {
    let data = generate_synthetic(300, 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("synthetic.csv");
    let schema = write_encoded(&data, &path).unwrap();
    assert_eq!(load_csv_raw(&path, &schema).unwrap(), data);
}

#[test]
fn front_is_mutually_nondominated_and_reproducible() {
    let raw = generate_synthetic(600, 1).unwrap();
    let (train, _, _) = split(&raw, &SplitSpec::default()).unwrap();
    let (train, _) = train.normalized();
    let bound = bi_objective().bind(&train).unwrap();
    let a = pfsmg_run(&bound, &SmgConfig::default(), &small_pfsmg(3)).unwrap();
    let b = pfsmg_run(&bound, &SmgConfig::default(), &small_pfsmg(3)).unwrap();
    assert_eq!(a.front, b.front);
    assert!(a.front.len() > 5);
    let f = a.front.objective_values();
    for u in &f {
        for v in &f {
            assert!(!dominates(u, v).unwrap());
        }
    }
    for p in a.front.points() {
        assert_eq!(bound.values(&p.x).unwrap(), p.f);
    }
}

#[test]
fn tri_objective_front() {
    let raw = generate_synthetic(500, 2).unwrap();
    let (train, _) = raw.normalized();
    let set = ObjectiveSet::new(vec![
        ObjectiveSpec::LogisticLoss { lambda_reg: 0.0 },
        ObjectiveSpec::DiBinary {
            attribute: "a".into(),
        },
        ObjectiveSpec::EqualOppFnr {
            attribute: "a".into(),
            beta: 8.0,
        },
    ])
    .unwrap();
    let bound = set.bind(&train).unwrap();
    let smg = SmgConfig {
        batch: fairfront_core::data::BatchSchedule {
            batch0_per_objective: vec![80, 50, 50],
            growth_ratio: 1.018,
        },
        ..SmgConfig::default()
    };
    let out = pfsmg_run(&bound, &smg, &small_pfsmg(5)).unwrap();
    assert!(out.front.points().iter().all(|p| p.f.len() == 3));
    assert!(out.history.iter().all(|h| h.hypervolume.is_some()));
}

#[test]
fn baseline_and_pfsmg_compare() {
    let raw = generate_synthetic(400, 7).unwrap();
    let (train, _) = raw.normalized();
    let bound = bi_objective().bind(&train).unwrap();
    let pf = pfsmg_run(&bound, &SmgConfig::default(), &small_pfsmg(7)).unwrap();
    let cfg = EpsSweepConfig {
        n_thresholds: 12,
        ..EpsSweepConfig::default()
    };
    let eps = sweep_front(&bound, &cfg).unwrap();
    assert!(eps.front.len() >= 2);
    let pf_small = downsample(&pf.front, eps.front.len()).unwrap();
    assert_eq!(pf_small.len(), eps.front.len().min(pf.front.len()));
    let report = compare_fronts(
        &[
            ("pfsmg".into(), pf_small.objective_values()),
            ("epsfair".into(), eps.front.objective_values()),
        ],
        0.0,
        None,
    )
    .unwrap();
    assert_eq!(report.reference.len(), 2);
    for m in &report.algorithms {
        assert!((0.0..=1.0).contains(&m.purity));
        assert!(m.hypervolume > 0.0);
    }
    assert!(report.algorithms[1].purity > 0.0);
}

#[test]
fn stream_of_one_batch_equals_cold_run() {
    let synth = fairfront_core::data::SyntheticConfig {
        n: 400,
        ..Default::default()
    };
    let batches = synthetic_batches(&synth, 400, 11).unwrap();
    let setup = StreamSetup {
        objectives: bi_objective(),
        smg: SmgConfig::default(),
        pfsmg: small_pfsmg(11),
        stream: StreamConfig::default(),
    };
    let mut snapshots = 0;
    let state = stream_run(batches.clone().into_iter().map(Ok), &setup, |_| {
        snapshots += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(snapshots, 1);
    let (data, _) = batches[0].normalized();
    let bound = bi_objective().bind(&data).unwrap();
    let cold = pfsmg_run(&bound, &setup.smg, &setup.pfsmg).unwrap();
    assert_eq!(state.front(), &cold.front);
}
