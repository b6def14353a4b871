use std::path::Path;
use std::process::{Command, Output};

use fracperc::gridset::GridSet;
use serde_json::Value;

fn fracperc(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracperc"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = fracperc(out, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn percolate_full_probability_counts() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["percolate", "--n", "3", "--p", "1", "--depth", "2"]);
    let csv = std::fs::read_to_string(dir.path().join("percolate.csv")).unwrap();
    let counts: Vec<u64> = data_rows(&csv).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(counts, [1, 9, 81]);
    let json = read_json(&dir.path().join("percolate.json"));
    assert_eq!(json["survived"], true);
    assert_eq!(json["mass_dimension"].as_f64().unwrap(), 2.0);
}

#[test]
fn percolate_zero_probability_dies() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["percolate", "--p", "0", "--depth", "3"]);
    assert_eq!(read_json(&dir.path().join("percolate.json"))["survived"], false);
}

#[test]
fn count_only_matches_materialized() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    ok(a.path(), &["--seed", "5", "percolate", "--p", "0.7", "--depth", "5"]);
    ok(b.path(), &["--seed", "5", "percolate", "--p", "0.7", "--depth", "5", "--count-only"]);
    let ca = read_json(&a.path().join("percolate.json"))["counts"].clone();
    let cb = read_json(&b.path().join("percolate.json"))["counts"].clone();
    assert_eq!(ca, cb);
}

#[test]
fn fixed_seed_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "42", "percolate", "--p", "0.75", "--depth", "4", "--render"];
    ok(a.path(), &args);
    ok(b.path(), &args);
    for f in ["percolate.csv", "percolate.json", "percolate.ppm"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let args = ["--seed", "3", "--threads", "2", "sweep", "--depth", "3", "--trials", "30", "--points", "5"];
    ok(a.path(), &args);
    ok(b.path(), &args);
    assert_eq!(std::fs::read(a.path().join("sweep.csv")).unwrap(), std::fs::read(b.path().join("sweep.csv")).unwrap());
}

#[test]
fn every_output_embeds_provenance() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--seed", "11", "percolate", "--depth", "2", "--render"]);
    let csv = std::fs::read_to_string(dir.path().join("percolate.csv")).unwrap();
    assert!(csv.contains("# seed 11") && csv.contains("# command percolate") && csv.contains("# fracperc "));
    let meta = &read_json(&dir.path().join("percolate.json"))["meta"];
    assert_eq!(meta["seed"], 11);
    assert_eq!(meta["version"], fracperc::VERSION);
    assert_eq!(meta["params"]["depth"], 2);
    let ppm = std::fs::read(dir.path().join("percolate.ppm")).unwrap();
    assert!(String::from_utf8_lossy(&ppm[..200]).contains("# seed 11"));
    ok(dir.path(), &["--seed", "11", "gallery", "--set", "carpet", "--depth", "1"]);
    let set = GridSet::from_text(&std::fs::read_to_string(dir.path().join("carpet.gridset")).unwrap()).unwrap();
    assert!(set.provenance.iter().any(|l| l == "seed 11"));
}

#[test]
fn sweep_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sweep", "--grid", "0,1", "--depth", "3", "--trials", "10"]);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let freq: Vec<f64> = data_rows(&csv).iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(freq, [0.0, 1.0]);
}

#[test]
fn sweep_smoke_run_writes_21_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sweep", "--n", "3", "--depth", "6", "--trials", "200", "--points", "21"]);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 21);
    let freq: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(freq.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn gallery_carpet_then_boxdim() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gallery", "--set", "carpet", "--depth", "1"]);
    let path = dir.path().join("carpet.gridset");
    let set = GridSet::from_text(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(set.len(), 8);
    assert!(dir.path().join("carpet.ppm").exists());
    ok(dir.path(), &["boxdim", "--input", path.to_str().unwrap()]);
    let json = read_json(&dir.path().join("boxdim.json"));
    assert_eq!(json["report"]["counts"], serde_json::json!([8]));
    assert!(json["report"].get("slope").is_some());
}

#[test]
fn gridset_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for set in ["triangle", "koch", "product", "section"] {
        ok(dir.path(), &["gallery", "--set", set, "--depth", "3"]);
        let text = std::fs::read_to_string(dir.path().join(format!("{set}.gridset"))).unwrap();
        let parsed = GridSet::from_text(&text).unwrap();
        assert_eq!(parsed.to_text(), text, "{set}");
    }
}

#[test]
fn walks_hierarchy_outputs() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--seed", "1", "walks", "--n", "6", "--p", "0.995", "--m", "2"]);
    let json = read_json(&dir.path().join("walks.json"));
    let walks = json["hierarchy"]["walks"].as_object().unwrap();
    assert_eq!(walks.values().filter(|w| w["level"] == 1).count(), 4);
    assert_eq!(walks.values().filter(|w| w["level"] == 2).count(), 16);
    assert_eq!(json["edge_cantor"].as_array().unwrap().len(), 16);
    let ppm = std::fs::read(dir.path().join("walks.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6"));
}

#[test]
fn arc_and_extinction_outputs() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["arc", "--levels", "3"]);
    let json = read_json(&dir.path().join("arc.json"));
    assert_eq!(json["bad_counts"].as_array().unwrap().len(), 4);
    assert!(dir.path().join("badset.gridset").exists());
    ok(dir.path(), &["extinction", "--trials", "500"]);
    let q = read_json(&dir.path().join("extinction.json"))["report"]["analytic_q"].as_f64().unwrap();
    assert!((q - 0.5983).abs() < 1e-3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fracperc(dir.path(), &["percolate", "--n", "1"]).status.code(), Some(2));
    assert_eq!(fracperc(dir.path(), &["percolate", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(fracperc(dir.path(), &["nonsense"]).status.code(), Some(2));
    assert_eq!(fracperc(dir.path(), &["boxdim", "--input", "/nonexistent/x.gridset"]).status.code(), Some(1));
    let bad = dir.path().join("bad.gridset");
    std::fs::write(&bad, "GRIDSET 3\n").unwrap();
    assert_eq!(fracperc(dir.path(), &["boxdim", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
    let o = fracperc(dir.path(), &["percolate", "--p", "1", "--depth", "9", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    let o = fracperc(dir.path(), &["walks", "--p", "0.3", "--attempts", "3"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!o.stderr.is_empty());
}

#[test]
fn config_file_with_explicit_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"seed": 8, "n": 2, "p": 1.0, "depth": 3}"#).unwrap();
    ok(dir.path(), &["percolate", "--config", cfg.to_str().unwrap(), "--depth", "2"]);
    let json = read_json(&dir.path().join("percolate.json"));
    assert_eq!(json["counts"], serde_json::json!([1, 4, 16]));
    assert_eq!(json["meta"]["seed"], 8);
    std::fs::write(&cfg, r#"{"n": {"nested": 1}}"#).unwrap();
    assert_eq!(fracperc(dir.path(), &["percolate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
