use std::path::Path;
use std::process::{Command, Output};

use corrlab::runlog::{read_all, sha256_hex};
use serde_json::Value;

fn corrlab(log: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrlab"))
        .args(args)
        .env("CORRLAB_RUN_LOG", log)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn seed_functor_verify_chain_with_run_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("runs.jsonl");
    let seed = dir.path().join("seed.json");
    let image = dir.path().join("image.json");
    let (seed_s, image_s) = (seed.to_str().unwrap(), image.to_str().unwrap());

    let out = corrlab(&log, &["seed", "--kind", "planar-half", "--n", "5", "--alpha", "5/2", "-o", seed_s]);
    assert_eq!(out.status.code(), Some(0));

    let out = corrlab(&log, &["functor", "--kind", "s", "--input", seed_s, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["tuple"]["k"], 3);
    assert_eq!(doc["report"]["alpha_out"], "5/3");
    std::fs::write(&image, serde_json::to_vec(&doc["tuple"]).unwrap()).unwrap();

    let out = corrlab(&log, &["verify", "--input", image_s, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);

    let records = read_all(&log).unwrap();
    assert_eq!(records.len(), 3);
    let seed_bytes = std::fs::read(&seed).unwrap();
    assert_eq!(records[0].outputs[0].sha256, sha256_hex(&seed_bytes));
    assert_eq!(records[1].inputs[0].sha256, sha256_hex(&seed_bytes));
    assert!(records.iter().all(|r| r.exit_code == 0));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("runs.jsonl");

    let out = corrlab(&log, &["d2", "--s", "1/2", "--t", "1/3", "--u", "1/2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = corrlab(&log, &["solve", "--n", "5", "--alpha", "5/3", "--k", "2", "--json"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "infeasible");

    let out = corrlab(&log, &["channel", "bound", "--n", "5", "--t", "sqrt(2)/2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("II₁"));

    let out = corrlab(&log, &["sigma", "--n", "5", "--alpha", "not-a-number"]);
    assert_eq!(out.status.code(), Some(4));

    let records = read_all(&log).unwrap();
    let codes: Vec<i32> = records.iter().map(|r| r.exit_code).collect();
    assert_eq!(codes, vec![2, 3, 3]);
}

#[test]
fn witness_bundle_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("runs.jsonl");
    let bundle = dir.path().join("w.json");
    let bundle_s = bundle.to_str().unwrap();

    let out = corrlab(&log, &["witness", "--n", "5", "--t", "2/5", "-o", bundle_s]);
    assert_eq!(out.status.code(), Some(0));
    let out = corrlab(&log, &["witness", "--check", bundle_s, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let check = json(&out);
    assert_eq!(check["pass"], true);
    assert!(check["moments_vs_a"].as_f64().unwrap() <= 1e-10);

    let records = read_all(&log).unwrap();
    assert_eq!(records.len(), 2);
    assert!(records[0].residuals["moments_vs_a"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn build_b_matches_channel_input() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("runs.jsonl");
    let out = corrlab(&log, &["buildB", "--n", "5", "--t", "2/5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["report"]["pass"], true);
    let b = dir.path().join("b.json");
    std::fs::write(&b, serde_json::to_vec(&doc["B"]).unwrap()).unwrap();
    let out = corrlab(&log, &["channel", "analyze", "--input", b.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["completely_positive"], true);
}
