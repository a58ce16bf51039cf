use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn id3j(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_id3j"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

const PARITY: &str = r#"{"n": 8, "probs": [0.75, 0.75, 0.75, 0.75, 0.75, 0.75, 0.75, 0.75],
    "target": {"type": "parity", "support": [0, 1]}, "m": 2048, "trials": 6, "seed": 5}"#;

const SMOOTHED: &str = r#"{"n": 10, "probs": {"base": [0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5], "alpha": 0.2, "c": 0.1},
    "target": {"type": "random_junta", "support": [2, 5, 7]}, "m": 5000, "trials": 8, "seed": 3}"#;

const AND3: &str = r#"{"n": 4, "probs": [0.6, 0.7, 0.65, 0.5],
    "target": {"type": "explicit", "support": [0, 1, 2], "table": [0, 0, 0, 0, 0, 0, 0, 1]}}"#;

fn text(path: PathBuf) -> String {
    fs::read_to_string(path).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn experiment_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", SMOOTHED);
    let cfg = cfg.to_str().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out_a = id3j(&["experiment", "--config", cfg, "--out", a.to_str().unwrap(), "--jobs", "1"]);
    let out_b = id3j(&["experiment", "--config", cfg, "--out", b.to_str().unwrap(), "--jobs", "4"]);
    assert!(out_a.status.success() && out_b.status.success());
    let csv = text(a.join("trials.csv"));
    assert_eq!(csv, text(b.join("trials.csv")));
    assert_eq!(csv.lines().count(), 9);

    let summary: Value = serde_json::from_str(&text(a.join("summary.json"))).unwrap();
    assert_eq!(summary["trials"], 8);
    assert_eq!(summary["config"]["seed"], 3);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", PARITY);
    let out = dir.path().join("o");
    let run = id3j(&["experiment", "--config", cfg.to_str().unwrap(), "--seed", "100", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    let csv = text(out.join("trials.csv"));
    assert!(csv.lines().nth(1).unwrap().starts_with("0,100,"));
    assert!(String::from_utf8_lossy(&run.stdout).contains("success_rate="));
}

#[test]
fn learn_from_config_matches_first_trial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", SMOOTHED);
    let cfg = cfg.to_str().unwrap();
    let learned = dir.path().join("learn");
    let run = id3j(&["learn", "--config", cfg, "--out", learned.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report: Value = serde_json::from_str(&text(learned.join("learn.json"))).unwrap();

    let batch = dir.path().join("batch");
    assert!(id3j(&["experiment", "--config", cfg, "--out", batch.to_str().unwrap()]).status.success());
    let first = text(batch.join("trials.csv")).lines().nth(1).unwrap().to_string();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(report["exact_loss"].as_f64().unwrap(), fields[2].parse::<f64>().unwrap());
    assert_eq!(report["size"].as_u64().unwrap(), fields[4].parse::<u64>().unwrap());

    // The saved tree and sample load back.
    let tree: Value = serde_json::from_str(&text(learned.join("tree.json"))).unwrap();
    assert!(tree.get("feature").is_some() || tree.get("leaf").is_some());
    assert!(text(learned.join("dataset.txt")).starts_with("n=10 m=5000\n"));
    assert_eq!(String::from_utf8(run.stdout).unwrap(), text(learned.join("tree.txt")));
}

#[test]
fn learn_from_dataset_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_config(dir.path(), "s.txt", "n=3 m=4\n000,0\n101,1\n011,1\n110,0\n");
    let run = id3j(&["learn", "--data", data.to_str().unwrap(), "--json"]);
    let tree = stdout_json(&run);
    assert!(tree["feature"].as_u64().unwrap() < 3);
    let report: Value = serde_json::from_slice(run.stderr.trim_ascii_end()).unwrap();
    assert_eq!(report["training_errors"], 0);

    let bad = write_config(dir.path(), "bad.txt", "n=3 m=1\n01,0\n");
    assert_eq!(id3j(&["learn", "--data", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn oracle_reports_exact_quantities() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "and.json", AND3);
    let report = stdout_json(&id3j(&["oracle", "--config", cfg.to_str().unwrap(), "--w", "1***"]));
    let p = report["label_prob"].as_f64().unwrap();
    assert!((p - 0.7 * 0.65).abs() < 1e-15);
    assert_eq!(report["pure"], false);
    let features = report["features"].as_array().unwrap();
    assert_eq!(features.len(), 3);
    let outside = features.iter().find(|f| f["i"] == 3).unwrap();
    assert_eq!(outside["gain"], 0.0);
    assert_eq!(report["basic_conditions"]["holds"], true);
    assert!(report["basic_conditions"].get("subcubes").is_none());

    let one = stdout_json(&id3j(&["oracle", "--config", cfg.to_str().unwrap(), "--i", "1", "--subcubes"]));
    assert_eq!(one["features"].as_array().unwrap().len(), 1);
    assert_eq!(one["basic_conditions"]["subcubes"].as_array().unwrap().len(), 27);

    let wrong = id3j(&["oracle", "--config", cfg.to_str().unwrap(), "--w", "1**"]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn fourier_of_a_parity_is_one_character() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.json", PARITY);
    let report = stdout_json(&id3j(&["fourier", "--config", cfg.to_str().unwrap(), "--i", "0", "--c", "0.1"]));
    let coeffs = report["coefficients"].as_array().unwrap();
    // χ_{0,1} = 1 on odd sums: f = 1/2 - (2x_0-1)(2x_1-1)/2.
    assert_eq!(coeffs.len(), 2);
    assert_eq!(coeffs[0]["coeff"], 0.5);
    assert_eq!(coeffs[1]["coeff"], -0.5);
    assert_eq!(coeffs[1]["set"], serde_json::json!([0, 1]));
    assert_eq!(report["split"]["g"].as_array().unwrap().len(), 1);
    assert!(report["split"]["normalized"].is_array());

    let fixed = id3j(&["fourier", "--config", cfg.to_str().unwrap(), "--w", "***1****"]);
    assert_eq!(fixed.status.code(), Some(2), "fixing a coordinate outside the support");
}

#[test]
fn sweep_writes_table_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.json", PARITY);
    let out = dir.path().join("sweep");
    let run = id3j(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--axis", "m", "--values", "32,bad",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(2));

    let run = id3j(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--axis", "m", "--values", "32,0.5,512",
        "--out", out.to_str().unwrap(), "--trials", "3",
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = text(out.join("sweep.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "m,success_rate,mean_loss,mean_tree_size,trials,error");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("0.5,,,,0,"), "row-level error: {}", lines[2]);
    assert!(text(out.join("plot.svg")).contains("<polyline"));

    let empty = dir.path().join("empty");
    let run = id3j(&["sweep", "--config", cfg.to_str().unwrap(), "--axis", "k", "--out", empty.to_str().unwrap()]);
    assert!(run.status.success());
    assert_eq!(text(empty.join("sweep.csv")).lines().count(), 1);
}

#[test]
fn config_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(id3j(&["experiment"]).status.code(), Some(2));
    assert_eq!(id3j(&["experiment", "--config", "/no/such/file.json"]).status.code(), Some(2));
    let bad = write_config(dir.path(), "bad.json", r#"{"n": 2, "probs": [0.5], "target": {"type": "parity", "support": [0]}, "m": 5}"#);
    let run = id3j(&["experiment", "--config", bad.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("config error"));
    let zero = write_config(dir.path(), "zero.json", &PARITY.replace("\"trials\": 6", "\"trials\": 0"));
    assert_eq!(id3j(&["experiment", "--config", zero.to_str().unwrap()]).status.code(), Some(2));
}
