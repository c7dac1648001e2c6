//! Exit-code contract and output determinism of the command-line tool.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_equipart"))
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("fixtures")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("equipart-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn partition_fixture_is_valid_and_exits_zero() {
    let input = fixtures().join("points15.txt");
    let out = run(&["partition", "--input", input.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid"], serde_json::Value::Bool(true));
    for (_, count) in report["octant_counts"].as_object().unwrap() {
        assert_eq!(count.as_u64(), Some(1));
    }
}

#[test]
fn shipped_fixture_matches_its_generator_command() {
    let expected = std::fs::read(fixtures().join("points15.txt")).unwrap();
    let out = run(&["generate", "random", "15", "--seed", "1"]);
    assert!(out.status.success());
    assert_eq!(out.stdout, expected);
}

#[test]
fn five_points_take_the_trivial_route() {
    let input = fixtures().join("points5.txt");
    let out = run(&["partition", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid"], serde_json::Value::Bool(true));
    assert_eq!(
        report["provenance"]["trivial_small_case"],
        serde_json::Value::Bool(true)
    );
}

#[test]
fn parse_failure_exits_two() {
    let bad = tmp("bad.txt");
    std::fs::write(&bad, "1 2\n").unwrap();
    let out = run(&["partition", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // Missing file is also an input failure.
    let out = run(&["partition", "--input", "/nonexistent/nope.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn duplicate_point_without_perturb_exits_three() {
    let dup = tmp("dup.txt");
    let base = std::fs::read_to_string(fixtures().join("points15.txt")).unwrap();
    let mut lines: Vec<&str> = base.lines().filter(|l| !l.starts_with('#')).collect();
    lines[1] = lines[0];
    std::fs::write(&dup, lines.join("\n")).unwrap();
    let out = run(&["partition", "--input", dup.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    // With consent the run succeeds.
    let out = run(&["partition", "--input", dup.to_str().unwrap(), "--perturb"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_round_trip_through_files() {
    let input = fixtures().join("points15.txt");
    let planes = tmp("planes.txt");
    let out = run(&[
        "partition",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "text",
        "--output",
        planes.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "verify",
        "--input",
        input.to_str().unwrap(),
        "--planes",
        planes.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid"], serde_json::Value::Bool(true));
}

#[test]
fn json_outputs_are_byte_identical_across_reruns() {
    let input = fixtures().join("points15.txt");
    for args in [
        vec!["partition", "--input", input.to_str().unwrap(), "--seed", "9"],
        vec!["generate", "adversarial", "23", "--seed", "5"],
        vec!["verify", "--input", input.to_str().unwrap(), "--planes", "SELF"],
    ] {
        if args[0] == "verify" {
            continue; // covered by the round-trip test; needs a planes file
        }
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "non-deterministic output for {args:?}");
    }
}

#[test]
fn trace_log_is_emitted_as_json_lines() {
    let input = fixtures().join("points15.txt");
    let log = tmp("trace.jsonl");
    let out = run(&[
        "partition",
        "--input",
        input.to_str().unwrap(),
        "--emit-trace-log",
        log.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&log).unwrap();
    let mut kinds = Vec::new();
    for line in text.lines() {
        let doc: serde_json::Value = serde_json::from_str(line).unwrap();
        kinds.push(doc["type"].as_str().unwrap().to_string());
    }
    assert_eq!(kinds.first().map(String::as_str), Some("trace"));
    assert_eq!(kinds.last().map(String::as_str), Some("search_outcome"));
    assert!(kinds.iter().any(|k| k == "search_round"));
}

#[test]
fn stats_csv_has_the_documented_schema() {
    let out = run(&["stats", "--sizes", "15,23", "--kind", "random", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kind,n,seed,m,trace_ms,search_rounds,rounds_bound,blocked_chords,used_fallback,total_ms"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "random");
    assert_eq!(row[1], "15");
    let rounds: u64 = row[5].parse().unwrap();
    let bound: u64 = row[6].parse().unwrap();
    assert!(rounds <= bound);
}

#[test]
fn plane4_quarter_bound_on_the_fixture() {
    let input = fixtures().join("weighted16.txt");
    let out = run(&["plane4", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["north", "east", "south", "west"] {
        let w: i64 = doc["quadrant_weights"][key].as_str().unwrap().parse().unwrap();
        assert!(w <= 4, "{key} quadrant holds {w} > 4");
    }
    // Zero-weight input is a parse failure.
    let bad = tmp("w0.txt");
    std::fs::write(&bad, "1 2 0\n").unwrap();
    let out = run(&["plane4", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn direction_flag_rejects_zero_vector() {
    let input = fixtures().join("points15.txt");
    let out = run(&[
        "partition",
        "--input",
        input.to_str().unwrap(),
        "--direction",
        "0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
