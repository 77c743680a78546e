use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn shadowlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowlab")).args(args).output().expect("binary runs")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn list_names_every_scenario() {
    let out = shadowlab(&["scenario", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "cantor-2.8",
        "tent-ball-2.9",
        "slimit-3",
        "iterate-3.8",
        "hshadow-4.3",
        "pl-region-5.2",
        "logistic-5.4",
        "kneading-5.6",
        "odometer-6.1",
        "sft-6.4",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = shadowlab(&["scenario", "run", "tent-ball-2.9", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ta, tb) = (fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
    // the artifact path is the only difference
    assert_eq!(ta.replace("a.json", "X"), tb.replace("b.json", "X"));
    let again = dir.path().join("a.json");
    shadowlab(&["scenario", "run", "tent-ball-2.9", "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(&again).unwrap(), ta);
}

#[test]
fn csv_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (j, c) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    shadowlab(&["scenario", "run", "slimit-3", "--out", j.to_str().unwrap()]);
    shadowlab(&["scenario", "run", "slimit-3", "--format", "csv", "--out", c.to_str().unwrap()]);
    let from_json: BTreeSet<(String, String)> = json_file(&j)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["label"].as_str().unwrap().into(), c["status"].as_str().unwrap().into()))
        .collect();
    let text = fs::read_to_string(&c).unwrap();
    let from_csv: BTreeSet<(String, String)> = csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string())
        })
        .collect();
    assert_eq!(from_json, from_csv);
    assert!(!from_json.is_empty());
}

#[test]
fn reports_embed_defaults() {
    let out = shadowlab(&["scenario", "run", "slimit-3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["params"]["seed"], 7);
    assert_eq!(v["params"]["epsilon"], "1/4");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["provenance"].is_string()));
}

#[test]
fn exit_status_tracks_outcome() {
    assert_eq!(shadowlab(&["scenario", "run", "cantor-2.8"]).status.code(), Some(1));
    assert_eq!(shadowlab(&["scenario", "run", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(shadowlab(&["scenario", "run", "slimit-3", "--epsilon", "x"]).status.code(), Some(2));
    assert_eq!(shadowlab(&["scenario", "run", "cantor-2.8", "--depth", "2"]).status.code(), Some(2));
}

#[test]
fn shadow_commands_read_files() {
    let dir = tempfile::tempdir().unwrap();
    let system = dir.path().join("t2.json");
    fs::write(&system, r#"{"kind": "pl", "breakpoints": ["0", "1/2", "1"], "values": ["0", "1", "0"]}"#).unwrap();
    let orbit = dir.path().join("orbit.csv");
    fs::write(&orbit, "1/3\n2/3\n2/3\n").unwrap();
    let args = |kind| {
        shadowlab(&[
            "shadow",
            kind,
            "--system",
            system.to_str().unwrap(),
            "--orbit",
            orbit.to_str().unwrap(),
            "--epsilon",
            "1/10",
        ])
    };
    let solve: Value = serde_json::from_slice(&args("solve").stdout).unwrap();
    assert_eq!(solve["verdict"], "yes");
    assert_eq!(solve["report"]["exact_hit"], true);
    let oracle: Value = serde_json::from_slice(&args("oracle").stdout).unwrap();
    assert_eq!(oracle["verdict"], "yes");

    let json_orbit = dir.path().join("orbit.json");
    fs::write(&json_orbit, r#"{"claimedDelta": "1/100", "points": ["1/2", "0"]}"#).unwrap();
    let out = shadowlab(&[
        "shadow",
        "oracle",
        "--system",
        system.to_str().unwrap(),
        "--orbit",
        json_orbit.to_str().unwrap(),
        "--epsilon",
        "1/10",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "no");
}

#[test]
fn expansivity_check_reports_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let system = dir.path().join("t2.json");
    fs::write(&system, r#"{"kind": "pl", "breakpoints": ["0", "1/2", "1"], "values": ["0", "1", "0"]}"#).unwrap();
    let out = shadowlab(&[
        "expansivity",
        "check",
        "--system",
        system.to_str().unwrap(),
        "--property",
        "expanding",
        "--region",
        r#"[["0", "1"]]"#,
        "--delta",
        "1/4",
        "--mu",
        "3/2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["holds"], "falsified");
    assert_eq!(v["revalidated"], true);

    let missing = shadowlab(&["expansivity", "check", "--system", system.to_str().unwrap(), "--property", "star"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn kneading_search_matches_generated_word() {
    let out = shadowlab(&["kneading", "search", "--generated", "200", "--horizon", "15", "--steps", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["matched"], true);
    assert_eq!(v["achieved"], "RLLRRLRRRLRRRRL");
}
