//! Drives the `polarimeter` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn polarimeter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarimeter"))
        .args(args)
        .env_remove("CI")
        .env_remove("POLARIMETER_THREADS")
        .output()
        .unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn analyze_prints_json_report() {
    let out = polarimeter(&["analyze", "--graph", &data("karate.tsv"), "--labels", &data("karate_factions.tsv"), "--runs", "10", "--seed", "3"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["runs"], 10);
    assert_eq!(json["seed"], 3);
    assert_eq!(json["per_run"].as_array().unwrap().len(), 10);
    assert_eq!(json["per_run"][9]["seed"], 12);
}

#[test]
fn analyze_csv_and_partition_output() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let partition = dir.path().join("partition.tsv");
    let out = polarimeter(&[
        "analyze",
        "--graph",
        &data("karate.tsv"),
        "--labels",
        &data("karate_factions.tsv"),
        "--runs",
        "4",
        "--seed",
        "1",
        "--format",
        "csv",
        "--out",
        report.to_str().unwrap(),
        "--partition-out",
        partition.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&report).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let rows = std::fs::read_to_string(&partition).unwrap();
    assert_eq!(rows.lines().count(), 34);
    assert!(rows.lines().all(|l| l.split('\t').count() == 2));
}

#[test]
fn missing_label_file_is_named() {
    let missing = "/nonexistent/labels.tsv";
    let out = polarimeter(&["analyze", "--graph", &data("karate.tsv"), "--labels", missing, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains(missing), "{}", text(&out.stderr));
}

#[test]
fn unlabeled_node_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.tsv");
    let all = std::fs::read_to_string(data("karate_factions.tsv")).unwrap();
    let kept: Vec<&str> = all.lines().filter(|l| !l.starts_with("33\t")).collect();
    std::fs::write(&labels, kept.join("\n")).unwrap();
    let out = polarimeter(&["analyze", "--graph", &data("karate.tsv"), "--labels", labels.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("33"), "{}", text(&out.stderr));
}

#[test]
fn seed_is_required_under_ci() {
    let out = Command::new(env!("CARGO_BIN_EXE_polarimeter"))
        .args(["demo-karate", "--runs", "2"])
        .env("CI", "true")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("--seed"));
}

#[test]
fn default_seed_applies_outside_ci() {
    let out = polarimeter(&["demo-karate", "--runs", "2", "--format", "csv"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let row = text(&out.stdout).lines().nth(1).unwrap().to_owned();
    assert_eq!(row.split(',').nth(4), Some("7"));
}

#[test]
fn help_lists_flags_and_defaults() {
    let out = polarimeter(&["analyze", "--help"]);
    assert!(out.status.success());
    let help = text(&out.stdout);
    for flag in ["--graph", "--labels", "--runs", "--seed", "--threads", "--format", "--out", "[default: 100]", "POLARIMETER_THREADS"] {
        assert!(help.contains(flag), "{flag} missing from help:\n{help}");
    }
    let sweep = text(&polarimeter(&["sweep", "--help"]).stdout);
    for flag in ["--sbm", "--dom-ratios", "--num-opinions", "[default: 0.3:1.0:0.1]", "[default: 2:10]"] {
        assert!(sweep.contains(flag), "{flag} missing from sweep help:\n{sweep}");
    }
}

#[test]
fn sweep_writes_one_row_per_cell() {
    let out = polarimeter(&["sweep", "--sbm", "4x30", "--p-in", "0.3", "--p-out", "0.01", "--dom-ratios", "0.5,1.0", "--num-opinions", "2:3", "--runs", "2", "--seed", "5"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let csv = text(&out.stdout);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "num_opinions,dom_ratio,mean_p,std_p,runs");
    assert_eq!(lines.len(), 5);
}

#[test]
fn bad_sbm_spec_is_a_usage_error() {
    let out = polarimeter(&["sweep", "--sbm", "twenty", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn build_network_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    std::fs::write(
        &records,
        concat!(
            r#"{"tweet_id":"1","author":"a","stance":"favor","retweeters":["b","c",""]}"#,
            "\n",
            r#"{"tweet_id":"2","author":"d","stance":"against","retweeters":["e","d"]}"#,
            "\n",
            r#"{"tweet_id":"3","author":"c","stance":"neutral","retweeters":["e"]}"#,
            "\n",
        ),
    )
    .unwrap();
    let prefix = dir.path().join("net");
    let out = polarimeter(&["build-network", "--records", records.to_str().unwrap(), "--out", prefix.to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let log = text(&out.stderr);
    assert!(log.contains("self-retweets dropped: 1"), "{log}");
    assert!(log.contains("empty retweeter ids skipped: 1"), "{log}");

    let names = std::fs::read_to_string(dir.path().join("net.names.tsv")).unwrap();
    assert_eq!(names, "0\tagainst\n1\tneutral\n2\tfavor\n");
    let edges = dir.path().join("net.edges.tsv");
    let labels = dir.path().join("net.labels.tsv");
    let out = polarimeter(&["analyze", "--graph", edges.to_str().unwrap(), "--labels", labels.to_str().unwrap(), "--runs", "3", "--seed", "1"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["graph"]["nodes"], 5);
    assert_eq!(json["graph"]["edges"], 4);
    assert_eq!(json["num_opinions"], 3);
}

#[test]
fn duplicate_tweet_is_rejected_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    let row = r#"{"tweet_id":"1","author":"a","stance":"favor"}"#;
    std::fs::write(&records, format!("{row}\n{row}\n")).unwrap();
    let out = polarimeter(&["build-network", "--records", records.to_str().unwrap(), "--out", dir.path().join("n").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert!(err.contains("records.jsonl") && err.contains('2'), "{err}");
}
