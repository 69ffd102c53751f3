use std::io::Write;
use std::process::{Command, Output};

use serde::Deserialize;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    step: String,
    anchor: String,
    value: String,
    provenance: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    records: Vec<Record>,
    status: String,
    #[serde(default)]
    error: Option<String>,
}

fn ncblow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncblow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn structured(out: &Output) -> Document {
    serde_json::from_slice(&out.stdout).expect("structured output parses")
}

#[test]
fn roundtrip_scenario_exits_zero() {
    let f = scenario_file(
        "algebra 9*[M:0] smooth\nblowup [P:4]\nblowdown E1\nexpect initial\nreport\n",
    );
    let out = ncblow(&[
        "--scenario",
        f.path().to_str().unwrap(),
        "--format",
        "structured",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = structured(&out);
    assert_eq!(doc.status, "ok");
    assert!(doc.error.is_none());
    assert!(doc
        .records
        .iter()
        .all(|r| !r.provenance.is_empty() && !r.step.is_empty()));
    let delta = doc
        .records
        .iter()
        .find(|r| r.anchor == "hilb R~ - hilb R")
        .unwrap();
    assert_eq!(delta.value, "(s) / (1-s)^3");
}

#[test]
fn exit_codes() {
    let low = scenario_file("algebra 3*[M:0]\nblowup [P:0]\n");
    let out = ncblow(&["--scenario", low.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree at least 4"));

    let bad = scenario_file("algebra 9*[M:0]\nexplode\n");
    assert_eq!(
        ncblow(&["--scenario", bad.path().to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let wrong = scenario_file("algebra 9*[M:0]\nexpect degree 8\n");
    assert_eq!(
        ncblow(&["--scenario", wrong.path().to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );

    assert_eq!(
        ncblow(&["--scenario", "/nonexistent/ncblow.scn"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(ncblow(&["--verify", "bogus"]).status.code(), Some(2));
    assert_eq!(ncblow(&[]).status.code(), Some(2));
}

#[test]
fn facts_load_relative_to_scenario() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("l.facts"),
        "# the line is exceptional\nline:L exceptional true declared\n",
    )
    .unwrap();
    let scn = dir.path().join("run.scn");
    std::fs::write(
        &scn,
        "algebra 8*[M:0] smooth\nline L right [P:1]\nfacts load l.facts\nblowdown L\nexpect degree 9\n",
    )
    .unwrap();
    let out = ncblow(&["--scenario", scn.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn repeated_blowup_report() {
    let out = ncblow(&["repeated-blowup", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = structured(&out);
    let value = |step: &str| {
        doc.records
            .iter()
            .find(|r| r.step == step)
            .unwrap()
            .value
            .clone()
    };
    assert_eq!(value("degrees"), "[9, 8, 7]");
    assert_eq!(value("dim J_1"), "6");
    assert_eq!(value("hilb Y/R"), "(2*s) / (1-s)^2");
    assert_eq!(value("smoothness T(2p)"), "not_smooth");
    assert_eq!(value("Mori-Smith (L . L)"), "undefined");
    assert_eq!(value("blowdown of L"), "degree 8");
}

#[test]
fn verify_is_deterministic() {
    let a = ncblow(&[
        "--verify",
        "oracle,roundtrip",
        "--seed",
        "7",
        "--format",
        "structured",
    ]);
    let b = ncblow(&[
        "--verify",
        "oracle,roundtrip",
        "--seed",
        "7",
        "--format",
        "structured",
        "--sequential",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc = structured(&a);
    assert_eq!(doc.records.len(), 2);
    assert!(doc.records.iter().all(|r| r.value.starts_with("pass")));
}

#[test]
fn trace_rows_follow_window() {
    let f = scenario_file("algebra 4*[M:0]\n");
    let out = ncblow(&[
        "--scenario",
        f.path().to_str().unwrap(),
        "--trace",
        "--window",
        "3",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.contains("h0 at degree")).count(),
        4
    );
    assert!(text.contains("h0 at degree 3: 12 for"));
}
