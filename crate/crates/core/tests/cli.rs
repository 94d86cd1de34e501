//! End-to-end runs of the `pqc` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pqc::channel::{Channel, KrausChannel};
use pqc::linalg::{haar_random_pure_state, ComplexMatrix};
use pqc::metrics::{cost_at_state, ExtensionIndex};
use pqc::noise::{build_cnot_variant, GateVariant, NoiseSpec};
use serde_json::Value;
use tempfile::TempDir;

fn pqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqc")).args(args).output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn write_channel(dir: &TempDir, name: &str, ch: &KrausChannel) -> PathBuf {
    write(dir, name, &Channel::Kraus(ch.clone()).to_json())
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// A small, fast config; `noise` is the JSON of the noise block.
fn quick_config(dir: &TempDir, noise: &str) -> PathBuf {
    let text = format!(
        r#"{{"noise": {noise}, "extension_dims": [1, 2],
            "optimizer": {{"restarts": 4, "mean_samples": 200, "certify_restarts": 8, "golden_tol": 0.001}},
            "seed": 5}}"#
    );
    write(dir, "cfg.json", &text)
}

const NOISELESS: &str = r#"{"qubits": [{"depolarizing": 0, "amplitude_damping": 0}, {"depolarizing": 0, "amplitude_damping": 0}]}"#;
const TABLE1: &str = r#"{"qubits": [{"depolarizing": 0.01, "amplitude_damping": 0.05}, {"depolarizing": 0.03, "amplitude_damping": 0.3}]}"#;

#[test]
fn validate_shipped_configs() {
    for name in ["table1.json", "noiseless.json"] {
        let out = pqc(&["validate", s(&configs().join(name))]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).contains("all channels valid"));
    }
}

#[test]
fn validate_rejects_out_of_range_gamma_with_position() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bad.json",
        "{\n  \"noise\": {\"qubits\": [\n    {\"depolarizing\": 0.01, \"amplitude_damping\": 1.5},\n    {\"depolarizing\": 0.03, \"amplitude_damping\": 0.3}]}\n}\n",
    );
    let out = pqc(&["validate", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line") && err.contains("column"), "{err}");
}

#[test]
fn validate_flags_hand_edited_non_tp_kraus_file() {
    let dir = TempDir::new().unwrap();
    // identity with one entry scaled down: trace decreasing
    let edited = r#"{"kind": "kraus", "dim": 2, "operators": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.9, 0.0]]]]}"#;
    write(&dir, "edited.json", edited);
    let cfg = write(&dir, "cfg.json", r#"{"channels": ["edited.json"]}"#);
    let out = pqc(&["validate", s(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("FAILED") && report.contains("edited.json"), "{report}");

    let good = write(&dir, "good.json", &Channel::Kraus(KrausChannel::identity(2)).to_json());
    let cfg = write(&dir, "cfg2.json", &format!(r#"{{"channels": ["{}"]}}"#, s(&good)));
    assert_eq!(pqc(&["validate", s(&cfg)]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pqc(&[]).status.code(), Some(2));
    assert_eq!(pqc(&["sweep"]).status.code(), Some(2));
    assert_eq!(pqc(&["validate", "/nonexistent/config.json"]).status.code(), Some(2));
    assert_eq!(pqc(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_noiseless_is_zero_and_writes_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = quick_config(&dir, NOISELESS);
    let csv = dir.path().join("sweep.csv");
    let out = pqc(&["sweep", s(&cfg), "--grid", "6", "--out", s(&csv)]);
    let stdout = stdout_json(&out);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 3 + 8);
    assert!(header.starts_with("w1,worst_cost,mean_cost,cost_state_1"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert!(r[1..].iter().all(|c| c.abs() <= 1e-8), "{r:?}");
    }
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(summary, stdout);
    assert_eq!(summary["per_m"].as_array().unwrap().len(), 2);
    assert_eq!(summary["per_m"][0]["extension"]["n"], 0);
}

#[test]
fn sweep_rows_are_ordered_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = quick_config(&dir, TABLE1);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(pqc(&["sweep", s(&cfg), "--grid", "5", "--out", s(&a)]).status.success());
    assert!(pqc(&["sweep", s(&cfg), "--grid", "5", "--out", s(&b)]).status.success());
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert_eq!(fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("b.json")).unwrap());
    for line in String::from_utf8(ta).unwrap().lines().skip(1) {
        let r: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(r[1] >= r[2] - 1e-9 && r[2] >= 0.0, "{r:?}");
        assert!(r[1] <= 1.0);
        // reference inputs never beat the worst case
        assert!(r[3..].iter().all(|&c| c <= r[1] + 1e-9), "{r:?}");
    }
}

#[test]
fn sweep_to_unwritable_path_leaves_no_file() {
    let dir = TempDir::new().unwrap();
    let cfg = quick_config(&dir, NOISELESS);
    let csv = dir.path().join("missing").join("out.csv");
    let out = pqc(&["sweep", s(&cfg), "--grid", "3", "--out", s(&csv)]);
    assert!(!out.status.success());
    assert!(!csv.exists());
}

#[test]
fn distance_cases() {
    let dir = TempDir::new().unwrap();
    let id = write_channel(&dir, "id.json", &KrausChannel::identity(2));
    let x = write_channel(
        &dir,
        "x.json",
        &KrausChannel::unitary(ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()).unwrap(),
    );
    let same = stdout_json(&pqc(&["distance", s(&id), s(&id)]));
    assert!(same["diamond_lower_bound"].as_f64().unwrap().abs() < 1e-12);
    for e in same["per_m"].as_array().unwrap() {
        assert!(e["cost"].as_f64().unwrap().abs() < 1e-12);
    }

    let ix = stdout_json(&pqc(&["distance", s(&id), s(&x), "--max-ext", "1"]));
    assert!((ix["diamond_lower_bound"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(ix["per_m"][0]["extension"], serde_json::json!({"m": 1, "n": 0}));

    let big = write_channel(&dir, "big.json", &KrausChannel::identity(4));
    assert_eq!(pqc(&["distance", s(&id), s(&big)]).status.code(), Some(2));
    assert_eq!(pqc(&["distance", s(&id), s(&x), "--max-ext", "3"]).status.code(), Some(2));

    let leaky = write(&dir, "leaky.json", r#"{"kind": "kraus", "dim": 2, "operators": [[[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]]}"#);
    assert_eq!(pqc(&["distance", s(&id), s(&leaky)]).status.code(), Some(1));
}

#[test]
fn distance_between_noisy_variants_beats_sampling() {
    let dir = TempDir::new().unwrap();
    let spec = NoiseSpec::table1();
    let direct = build_cnot_variant(GateVariant::Direct, &spec).unwrap();
    let hc = build_cnot_variant(GateVariant::HadamardConjugated, &spec).unwrap();
    let a = write_channel(&dir, "direct.json", &direct);
    let b = write_channel(&dir, "hc.json", &hc);
    let res = stdout_json(&pqc(&["distance", s(&a), s(&b), "--max-ext", "1"]));
    let value = res["per_m"][0]["cost"].as_f64().unwrap();
    assert!(value > 1e-3, "{value}");
    let mut sampled: f64 = 0.0;
    for seed in 0..20_000 {
        let eta = haar_random_pure_state(4, 1_000_000 + seed).unwrap();
        sampled = sampled.max(cost_at_state(&direct, &hc, &eta, ExtensionIndex::NONE).unwrap());
    }
    assert!(value >= sampled - 1e-4, "ascent {value} < sampled {sampled}");
    assert!(value - sampled < 0.05, "ascent {value} far above sampled {sampled}");
}

#[test]
fn optimize_noiseless_and_out_file() {
    let dir = TempDir::new().unwrap();
    let cfg = quick_config(&dir, NOISELESS);
    let out_path = dir.path().join("opt.json");
    let res = stdout_json(&pqc(&["optimize", s(&cfg), "--out", s(&out_path)]));
    assert!(res["certified_cost"].as_f64().unwrap() <= 1e-8);
    assert_eq!(res["method"], "golden");
    let w = res["w1_star"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&w));
    let file: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(file, res);
}

#[test]
fn optimize_matches_sweep_argmin() {
    let dir = TempDir::new().unwrap();
    let cfg = quick_config(&dir, TABLE1);
    let csv = dir.path().join("s.csv");
    let sweep = stdout_json(&pqc(&["sweep", s(&cfg), "--grid", "51", "--out", s(&csv)]));
    assert_eq!(sweep["interior_argmin"], true);
    let opt = stdout_json(&pqc(&["optimize", s(&cfg)]));
    let (w_opt, w_sweep) = (opt["w1_star"].as_f64().unwrap(), sweep["w1_star"].as_f64().unwrap());
    assert!((w_opt - w_sweep).abs() <= 0.02, "optimize {w_opt} vs sweep {w_sweep}");
    let cost = opt["certified_cost"].as_f64().unwrap();
    assert!(cost <= sweep["worst_cost_star"].as_f64().unwrap() + 1e-6);
}
