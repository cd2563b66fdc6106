use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn simland(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simland"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn synth(dir: &Path, kind: &str, n: usize) {
    let out = simland(&[
        "synth",
        "--kind",
        kind,
        "--n",
        &n.to_string(),
        "--seed",
        "1",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn config(methods: &[&str], landmarks: &[usize]) -> Value {
    json!({
        "data": {"similarity": "data/similarity.csv", "labels": "data/labels.csv"},
        "kernel": {"kind": "precomputed"},
        "methods": methods,
        "landmarks": landmarks,
        "runs": 3,
        "split": {"train_frac": 0.5, "valid_frac": 0.25, "test_frac": 0.25},
        "c_grid": [1.0, 10.0],
        "master_seed": 7
    })
}

#[test]
fn experiment_writes_report_csv_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    synth(&dir.path().join("data"), "linear-margin", 80);
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, config(&["bbs", "ftune-s"], &[4, 8]).to_string()).unwrap();
    let out_path = dir.path().join("report.json");
    let curve = dir.path().join("curve.csv");
    // run from elsewhere: data paths resolve against the config directory
    let out = simland(&[
        "experiment",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--curve-out",
        curve.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["version"], "v1");
    assert_eq!(report["cells"].as_array().unwrap().len(), 4);
    let csv = std::fs::read_to_string(out_path.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 2 * 2);
    let curve = std::fs::read_to_string(curve).unwrap();
    assert_eq!(curve.lines().next(), Some("method,landmarks,mean,std"));
    assert_eq!(curve.lines().count(), 5);
}

#[test]
fn experiment_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("config.json");

    std::fs::write(&cfg_path, "{ not json").unwrap();
    let out = simland(&["experiment", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let mut bad = config(&["bbs"], &[4]);
    bad["runs"] = json!(0);
    std::fs::write(&cfg_path, bad.to_string()).unwrap();
    let out = simland(&["experiment", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&cfg_path, config(&["bbs"], &[4]).to_string()).unwrap();
    let out = simland(&["experiment", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "missing data files");

    // more singleton landmarks than training points: every run fails
    synth(&dir.path().join("data"), "linear-margin", 40);
    std::fs::write(&cfg_path, config(&["bbs"], &[500]).to_string()).unwrap();
    let out = simland(&["experiment", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["degraded"], true);
}

#[test]
fn ftune_reports_validation_table() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "sign-favoring", 120);
    let sim = dir.path().join("similarity.csv");
    let labels = dir.path().join("labels.csv");
    let base = [
        "ftune",
        "--similarity",
        sim.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
        "--landmarks",
        "10",
    ];

    let v = stdout_json(&simland(&base));
    assert_eq!(v["method"], "ftune-s");
    let scores = v["result"]["validation_scores"].as_array().unwrap();
    assert_eq!(scores.len(), 6);
    let acc = v["test_accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));

    let mut fixed = base.to_vec();
    fixed.extend(["--transfer", "ramp:5"]);
    let v = stdout_json(&simland(&fixed));
    assert_eq!(v["result"]["problems"][0]["chosen"], "ramp:5");

    let again = stdout_json(&simland(&base));
    assert_eq!(again, stdout_json(&simland(&base)));

    let mm = dir.path().join("mm");
    synth(&mm, "multimodal", 120);
    let feats = mm.join("features.csv");
    let mm_labels = mm.join("labels.csv");
    for method in ["ftune-m", "bbs", "sign-baseline"] {
        let args = [
            "ftune",
            "--features",
            feats.to_str().unwrap(),
            "--labels",
            mm_labels.to_str().unwrap(),
            "--landmarks",
            "10",
            "--method",
            method,
            "--select",
            "dselect",
        ];
        let v = stdout_json(&simland(&args));
        assert_eq!(v["method"], method);
        assert_eq!(v["select"], "dselect");
    }
}

#[test]
fn ftune_rejects_bad_transfer() {
    let out = simland(&[
        "ftune",
        "--labels",
        "x",
        "--landmarks",
        "3",
        "--transfer",
        "cubic",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cubic"));
}

#[test]
fn embed_and_dselect() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "multimodal", 60);
    let feats = dir.path().join("features.csv");
    let labels = dir.path().join("labels.csv");
    let emb = dir.path().join("emb.csv");
    let v = stdout_json(&simland(&[
        "embed",
        "--features",
        feats.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
        "--landmarks",
        "5",
        "--transfer",
        "sign",
        "--out",
        emb.to_str().unwrap(),
    ]));
    assert_eq!(v["dim"], 5);
    let text = std::fs::read_to_string(&emb).unwrap();
    assert_eq!(text.lines().count(), 60);
    for line in text.lines() {
        let row: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row.len(), 5);
        assert!(row.iter().all(|x| [-1.0, 0.0, 1.0].contains(x)));
    }

    let v = stdout_json(&simland(&[
        "dselect",
        "--features",
        feats.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
        "--landmarks",
        "6",
        "--seed",
        "2",
    ]));
    let ids = v["landmarks"]["ids"].as_array().unwrap();
    assert_eq!(ids.len(), 6);
}

#[test]
fn verify_theory_prescribes_and_passes() {
    let v = stdout_json(&simland(&[
        "verify-theory",
        "--bound",
        "margin",
        "--trials",
        "4",
        "--n",
        "60",
    ]));
    assert_eq!(v["prescribed_landmarks"], 1199);
    assert_eq!(v["pass"], true);
    assert_eq!(v["values"].as_array().unwrap().len(), 4);

    let v = stdout_json(&simland(&[
        "verify-theory",
        "--bound",
        "surrogate",
        "--epsilon-one",
        "0.5",
        "--delta",
        "0.2",
        "--trials",
        "4",
        "--n",
        "60",
    ]));
    assert_eq!(v["prescribed_landmarks"], 237);
    assert_eq!(v["pass"], true);
}
