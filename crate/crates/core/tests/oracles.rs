mod common;

use proptest::prelude::*;
use rand::Rng;
use simland::goodness::{estimate_goodness_pairs, estimate_goodness_sign, GoodnessParams};
use simland::harness::{
    csv_path, emit_report, read_report, report_json, run_experiment_on, welch_t_test,
};
use simland::landmark::{dselect, dselect_landmarks, random_landmarks, random_pairs};
use simland::{
    seed, synth, DataPaths, Dataset, Error, ExperimentConfig, Kernel, KernelSpec, LossFunction,
    Matrix, Method, SelectionMode, SplitSpec, TransferFamily, TransferFunction, WeightFunction,
};

use common::*;

fn params(gamma: f64) -> GoodnessParams {
    GoodnessParams::new(0.0, gamma, 1.0, 0.1, 0.1).unwrap()
}

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        data: DataPaths {
            features: None,
            similarity: None,
            labels: "labels.csv".into(),
        },
        kernel: KernelSpec::precomputed(),
        methods: vec![Method::Bbs, Method::FtuneS],
        landmarks: vec![4, 8],
        runs: 3,
        split: SplitSpec::new(0.5, 0.25, 0.25, 0),
        c_grid: vec![1.0, 10.0],
        family: TransferFamily::default_family(),
        master_seed: 11,
        loss: LossFunction::hinge(1.0),
        bias: true,
        selection: SelectionMode::Similarity,
    }
}

#[test]
fn sign_estimator_is_pairs_estimator_on_negated_distances() {
    let mut rng = seed::rng(5);
    for _ in 0..30 {
        let n = rng.gen_range(4..20);
        let mut dist = Matrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f64::from(rng.gen_range(0..6));
                dist[(i, j)] = v;
                dist[(j, i)] = v;
            }
        }
        let labels: Vec<i64> = (0..n).map(|i| (i % 2) as i64).collect();
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ids: Vec<usize> = (0..n).collect();
        let ds_dist = Dataset::from_similarity(dist.clone(), &labels).unwrap();
        let sign = estimate_goodness_sign(&ds_dist, &dist, &ids, &u, &params(0.1)).unwrap();

        let ds_sim = Dataset::from_similarity(dist.map(|v| -v), &labels).unwrap();
        let kernel = Kernel::new(&KernelSpec::precomputed(), &ds_sim).unwrap();
        let pairs = estimate_goodness_pairs(
            &kernel,
            &ids,
            &TransferFunction::Sign,
            &WeightFunction::Product(u.clone()),
            &params(0.1),
        )
        .unwrap();
        // positive rescaling of K leaves every sign unchanged
        assert_eq!(sign.values, pairs.values);
    }
}

#[test]
fn dselect_is_more_diverse_than_random() {
    let ds = synth::multimodal_clusters(300, 3, 4).unwrap();
    let train: Vec<usize> = (0..300).collect();
    let kernel = Kernel::fit(&KernelSpec::gaussian(None), &ds, &train).unwrap();
    let mean_sim = |ids: &[usize]| {
        let mut s = 0.0;
        for &a in ids {
            for &b in ids {
                if a != b {
                    s += kernel.eval(a, b);
                }
            }
        }
        s / (ids.len() * (ids.len() - 1)) as f64
    };
    let (mut diverse, mut random) = (0.0, 0.0);
    for s in 0..20 {
        diverse += mean_sim(
            dselect_landmarks(&kernel, &train, 10, s, SelectionMode::Similarity)
                .unwrap()
                .ids(),
        );
        random += mean_sim(random_landmarks(&train, 10, s).unwrap().ids());
    }
    assert!(diverse <= random, "{diverse} vs {random}");
}

#[test]
fn report_round_trips_through_files() {
    let ds = synth::linear_margin(60, 3).unwrap();
    let cfg = small_config();
    let report = run_experiment_on(&cfg, &ds).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    emit_report(&report, &path).unwrap();
    assert_eq!(read_report(&path).unwrap(), report);
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        report_json(&report).unwrap()
    );

    let csv = std::fs::read_to_string(csv_path(&path)).unwrap();
    assert_eq!(
        csv.lines().count(),
        1 + cfg.runs * cfg.methods.len() * cfg.landmarks.len()
    );
    for cell in &report.cells {
        assert!(cell.accuracies.iter().all(|a| (0.0..=1.0).contains(a)));
    }
}

#[test]
fn report_into_missing_directory_is_io_error() {
    let ds = synth::linear_margin(60, 3).unwrap();
    let report = run_experiment_on(&small_config(), &ds).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = emit_report(&report, &dir.path().join("absent/report.json")).unwrap_err();
    assert!(matches!(err, Error::Io(_)), "{err}");
}

#[test]
fn unknown_config_field_is_rejected() {
    let mut v = serde_json::to_value(small_config()).unwrap();
    v["colour"] = serde_json::json!("blue");
    let err = ExperimentConfig::from_json_str(&v.to_string()).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn welch_is_antisymmetric(
        a in prop::collection::vec(0.0f64..1.0, 2..12),
        b in prop::collection::vec(0.0f64..1.0, 2..12),
    ) {
        let (tab, pab, sab) = welch_t_test(&a, &b).unwrap();
        let (tba, pba, sba) = welch_t_test(&b, &a).unwrap();
        match (tab, tba) {
            (Some(x), Some(y)) => prop_assert!((x + y).abs() <= 1e-12 * x.abs().max(1.0)),
            (None, None) => {}
            _ => prop_assert!(false, "finite on one side only"),
        }
        prop_assert!((pab - pba).abs() <= 1e-12);
        prop_assert_eq!(sab, sba);
        prop_assert!((0.0..=1.0).contains(&pab));
    }

    #[test]
    fn pairs_always_have_opposite_labels(n in 6usize..60, d in 1usize..30, s in any::<u64>()) {
        let ds = synth::multimodal_clusters(n, 2, s).unwrap();
        let labels = ds.binary_labels().unwrap();
        let train: Vec<usize> = (0..n).collect();
        let kernel = Kernel::fit(&KernelSpec::gaussian(None), &ds, &train).unwrap();
        let random = random_pairs(&labels, &train, d, s).unwrap();
        prop_assert_eq!(random.len(), d);
        let mut all = random.pairs().to_vec();
        if let Ok((_, diverse)) = dselect(&kernel, &train, &labels, d.min(n), s, SelectionMode::Similarity) {
            all.extend_from_slice(diverse.pairs());
        }
        for (p, q) in all {
            prop_assert_eq!(labels.get(p), 1);
            prop_assert_eq!(labels.get(q), -1);
        }
    }

    #[test]
    fn pair_goodness_matches_brute_force(s in any::<u64>()) {
        let mut rng = seed::rng(s);
        let inst = random_instance(&mut rng, 4, 14);
        let f = random_transfer(&mut rng);
        let kernel = Kernel::new(&KernelSpec::precomputed(), &inst.dataset).unwrap();
        let ids: Vec<usize> = (0..inst.n).collect();
        let est = estimate_goodness_pairs(&kernel, &ids, &f, &WeightFunction::Constant(1.0), &params(0.2)).unwrap();
        let brute = brute_pair_values(&normalized(&inst.raw), &inst.labels, &f, |_, _| 1.0);
        for (a, b) in est.values.iter().zip(&brute) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
