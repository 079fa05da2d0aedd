use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn unrect(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unrect"))
        .args(args)
        .current_dir(dir)
        .env_remove("UNRECT_BUDGET")
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    std::fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

#[test]
fn measure_at_level_one_is_nine_sixteenths() {
    let dir = tempfile::tempdir().unwrap();
    let out = unrect(&["measure", "--level", "1"], dir.path());
    assert!(out.status.success());
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["record"], "measure_bracket");
    assert_eq!(recs[0]["mu"], "9/16");
    assert_eq!(recs[0]["mu_f64"], 0.5625);
    assert_eq!(recs[0]["schema_version"], 1);
}

#[test]
fn evaluate_at_zero_gives_zero_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.toml", "command = \"evaluate\"\n[options]\nt = [\"0/1\"]\nlevel = 4\n");
    let out = unrect(&["run", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    let coords = recs[0]["coords"].as_array().unwrap();
    assert_eq!(coords.len(), 5);
    assert!(coords.iter().all(|c| c == "0/1"));
}

#[test]
fn scan_along_the_first_axis_has_full_measure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        "[options]\nlevel = 3\ndirections = [[\"1/1\", \"0/1\"]]\n",
    );
    let out = unrect(&["scan", "-c", &cfg], dir.path());
    assert!(out.status.success());
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["mu"], "1/1");
    assert_eq!(recs[0]["p"], "1/1");
}

#[test]
fn scan_records_are_sorted_by_direction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        "[options]\nlevel = 2\ndirections = [[\"1/1\", \"1/1\"], [\"-1/1\", \"1/2\"], [\"0/1\", \"1/1\"]]\n",
    );
    let recs = records(&unrect(&["scan", "-c", &cfg], dir.path()));
    let ps: Vec<&str> = recs.iter().map(|r| r["p"].as_str().unwrap()).collect();
    assert_eq!(ps, ["-1/1", "0/1", "1/1"]);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d.toml",
        "command = \"diagnose\"\nseed = 11\n[options]\ncheck = \"secant\"\nlevels = [4]\nsamples = 40\n",
    );
    assert!(unrect(&["run", "-c", &cfg, "-o", "a.jsonl"], dir.path()).status.success());
    assert!(unrect(&["run", "-c", &cfg, "-o", "b.jsonl"], dir.path()).status.success());
    let a = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    let b = std::fs::read(dir.path().join("b.jsonl")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn cache_hits_match_cold_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.toml",
        "command = \"measure\"\ncache_dir = \"cache\"\n[options]\nlevel = 3\n",
    );
    let cold = unrect(&["run", "-c", &cfg], dir.path());
    assert!(cold.status.success());
    let entries = std::fs::read_dir(dir.path().join("cache")).unwrap().count();
    assert_eq!(entries, 1);
    let warm = unrect(&["run", "-c", &cfg], dir.path());
    assert_eq!(cold.stdout, warm.stdout);
    let uncached = unrect(&["measure", "--level", "3"], dir.path());
    assert_eq!(cold.stdout, uncached.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "levle = 3\n");
    let out = unrect(&["run", "-c", &bad], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "malformed_config");

    let odd = write_config(
        dir.path(),
        "odd.toml",
        "[params]\nn_max = 3\nmodel = \"L2\"\n[params.alpha]\nkind = \"harmonic\"\na = \"1/2\"\n[params.m]\nkind = \"constant\"\nc = 3\n",
    );
    let out = unrect(&["validate", "-c", &odd], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(records(&out)[0]["passed"], false);

    let out = Command::new(env!("CARGO_BIN_EXE_unrect"))
        .args(["measure", "--level", "4"])
        .env("UNRECT_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "budget_exceeded");
}

#[test]
fn curve_writes_csv_and_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "command = \"curve\"\npreset = \"D2\"\n[options]\nlevel = 2\ncsv = \"gamma.csv\"\n",
    );
    let out = unrect(&["run", "-c", &cfg], dir.path());
    assert!(out.status.success());
    let recs = records(&out);
    assert_eq!(recs[1]["record"], "length_ledger");
    assert_eq!(recs[1]["entries"][0]["length"], "5/4");
    let csv = std::fs::read_to_string(dir.path().join("gamma.csv")).unwrap();
    // header plus 3 M_2 + 1 vertices
    assert_eq!(csv.lines().count(), 1 + 13);
}

#[test]
fn emit_converts_records() {
    let dir = tempfile::tempdir().unwrap();
    assert!(unrect(&["measure", "-n", "2", "-o", "m.jsonl"], dir.path()).status.success());
    let out = unrect(&["emit", "-i", "m.jsonl", "-f", "csv"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(header.contains(&"mu") && header.contains(&"mu_f64") && header.contains(&"tail.hi"));
    assert_eq!(lines.count(), 1);
    let out = unrect(&["emit", "-i", "m.jsonl", "-f", "json"], dir.path());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
}
