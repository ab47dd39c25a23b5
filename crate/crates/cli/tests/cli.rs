use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use conetrans::instance::load_instance;
use conetrans::paving::{compute_paving, PavingDocument};
use conetrans::transport::{verify_plan, PlanDocument, TransportPlan, Witness};
use serde_json::Value;
use tempfile::TempDir;

const EXAMPLE: &str = r#"{
  "labels": ["-1", "0", "1", "2"],
  "coords": [["-1"], ["0"], ["1"], ["2"]],
  "cone": "martingale",
  "mu": ["0", "1/2", "0", "1/2"],
  "nu": ["1/4", "0", "1/4", "1/2"]
}"#;

const SHIFTED: &str = r#"{
  "labels": ["0", "1", "2"],
  "coords": [["0"], ["1"], ["2"]],
  "cone": "martingale",
  "mu": ["1/2", "1/2", "0"],
  "nu": ["0", "1/2", "1/2"]
}"#;

const SAME: &str = r#"{
  "labels": ["a", "b"],
  "coords": [["0", "0"], ["1", "3"]],
  "cone": "supermartingale",
  "mu": ["0.25", "3/4"],
  "nu": ["1/4", "0.75"]
}"#;

struct Scratch(TempDir);

impl Scratch {
    fn new() -> Self {
        Scratch(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conetrans"))
        .args(args.iter().map(|a| a.as_ref()))
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn equal_marginals_are_ordered() {
    let s = Scratch::new();
    let inst = s.file("same.json", SAME);
    let out = run(&[&"check-order", &inst]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: PlanDocument = serde_json::from_value(json(&out)["plan"].clone()).unwrap();
    let instance = load_instance(SAME).unwrap();
    assert!(verify_plan(&instance, &TransportPlan::from_document(&instance, doc).unwrap()));
}

#[test]
fn shifted_mean_gives_a_witness() {
    let s = Scratch::new();
    let out = run(&[&"check-order", &s.file("shift.json", SHIFTED)]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["verdict"], "not-ordered");
    let w: Witness = serde_json::from_value(v["witness"].clone()).unwrap();
    assert!(w.verify(&load_instance(SHIFTED).unwrap()));
}

#[test]
fn malformed_input_exits_2() {
    let s = Scratch::new();
    let bad = s.file("bad.json", &EXAMPLE.replace("\"1/4\"", "\"1/x\""));
    let out = run(&[&"check-order", &bad]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("1/x"));
    let unbalanced = s.file("mass.json", &EXAMPLE.replace("\"1/2\"]", "\"1/3\"]"));
    assert_eq!(code(&run(&[&"paving", &unbalanced])), 2);
    assert_eq!(code(&run(&[&"check-order", &s.path("missing.json")])), 2);
}

#[test]
fn paving_of_the_example() {
    let s = Scratch::new();
    let inst = s.file("ex.json", EXAMPLE);
    let out = run(&[&"paving", &inst]);
    assert_eq!(code(&out), 0);
    let doc: PavingDocument = serde_json::from_slice(&out.stdout).unwrap();
    let classes: Vec<(Vec<String>, Vec<String>, usize)> =
        doc.components.iter().map(|c| (c.members.clone(), c.support.clone(), c.dim)).collect();
    assert_eq!(
        classes,
        vec![
            (vec!["0".into()], vec!["-1".into(), "1".into()], 1),
            (vec!["2".into()], vec!["2".into()], 0),
        ]
    );
    // the payload matches a fresh computation
    let instance = load_instance(EXAMPLE).unwrap();
    assert_eq!(doc, compute_paving(&instance).unwrap().to_document(&instance));

    let text = run(&[&"--format", &"text", &"paving", &inst]);
    assert!(String::from_utf8_lossy(&text.stdout).starts_with("2 classes"));
}

#[test]
fn plot_needs_two_dimensions() {
    let s = Scratch::new();
    let three = s.path("three.json");
    assert_eq!(code(&run(&[&"gen", &"--seed", &"5", &"--n", &"5", &"--d", &"3", &"--out", &three])), 0);
    let out = run(&[&"paving", &"--emit-plot", &three]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("warning"));
    assert!(json(&out).get("plot").is_none());

    let two = s.path("two.json");
    assert_eq!(code(&run(&[&"gen", &"--seed", &"5", &"--n", &"5", &"--d", &"2", &"--out", &two])), 0);
    let out = run(&[&"paving", &"--emit-plot", &two]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).is_empty());
    assert!(json(&out)["plot"].is_array());
}

#[test]
fn paving_of_unordered_exits_1() {
    let s = Scratch::new();
    assert_eq!(code(&run(&[&"paving", &s.file("shift.json", SHIFTED)])), 1);
    assert_eq!(code(&run(&[&"maximal", &s.file("shift2.json", SHIFTED)])), 1);
}

#[test]
fn polar_verdicts() {
    let s = Scratch::new();
    let inst = s.file("ex.json", EXAMPLE);
    let empty = run(&[&"polar", &inst, &s.file("empty.json", "[]")]);
    assert_eq!(code(&empty), 0);
    assert_eq!(json(&empty)["max_mass"], "0");

    let pinned = run(&[&"polar", &inst, &s.file("u21.json", r#"[["2", "1"]]"#)]);
    assert_eq!(code(&pinned), 0);
    assert_eq!(json(&pinned)["tag"], "polar");

    let charged = run(&[&"polar", &inst, &s.file("u01.json", r#"[["0", "1"]]"#)]);
    assert_eq!(code(&charged), 1);
    let v = json(&charged);
    assert_eq!(v["tag"], "non-polar");
    assert_eq!(v["max_mass"], "1/4");
    let doc: PlanDocument = serde_json::from_value(v["plan"].clone()).unwrap();
    let instance = load_instance(EXAMPLE).unwrap();
    assert!(verify_plan(&instance, &TransportPlan::from_document(&instance, doc).unwrap()));

    let null = run(&[&"polar", &"--unconstrained", &inst, &s.file("u10.json", r#"[["-1", "0"]]"#)]);
    assert_eq!(code(&null), 0);
    assert_eq!(json(&null)["decomposition"]["n1"][0], "-1");

    let bad = run(&[&"polar", &inst, &s.file("bad.json", r#"[["7", "1"]]"#)]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn support_and_maximal_kernel() {
    let s = Scratch::new();
    let inst = s.file("ex.json", EXAMPLE);
    let out = run(&[&"transport", &inst]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["support"], serde_json::json!([["0", "-1"], ["0", "1"], ["2", "2"]]));
    let out = run(&[&"maximal", &inst]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["supports"][0]["support"], serde_json::json!(["-1", "1"]));
}

#[test]
fn gleason_faces() {
    let s = Scratch::new();
    let inst = s.file("ex.json", EXAMPLE);
    assert_eq!(code(&run(&[&"gleason", &inst, &"0", &"1"])), 0);
    let out = run(&[&"gleason", &inst, &"-1", &"1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["equivalent"], false);
    assert_eq!(code(&run(&[&"gleason", &inst, &"0", &"9"])), 2);
}

#[test]
fn generated_plans_round_trip() {
    let s = Scratch::new();
    let inst = s.path("g.json");
    let plan = s.path("p.json");
    let out = run(&[&"gen", &"--seed", &"11", &"--n", &"6", &"--d", &"2", &"--cone", &"submartingale", &"--plan", &plan, &"--out", &inst]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(code(&run(&[&"verify-plan", &inst, &plan])), 0);
    // same seed, same bytes
    let again = s.path("g2.json");
    run(&[&"gen", &"--seed", &"11", &"--n", &"6", &"--d", &"2", &"--cone", &"submartingale", &"--out", &again]);
    assert_eq!(fs::read(&inst).unwrap(), fs::read(&again).unwrap());

    // a plan replayed against another instance is rejected
    let other = s.path("o.json");
    run(&[&"gen", &"--seed", &"12", &"--n", &"6", &"--d", &"2", &"--out", &other]);
    assert_eq!(code(&run(&[&"verify-plan", &other, &plan])), 2);

    let unordered = s.path("u.json");
    assert_eq!(code(&run(&[&"gen", &"--seed", &"11", &"--unordered", &"--out", &unordered])), 0);
    assert_eq!(code(&run(&[&"check-order", &unordered])), 1);
    assert_eq!(code(&run(&[&"gen", &"--n", &"1", &"--unordered"])), 2);
    assert_eq!(code(&run(&[&"gen", &"--cone", &"sideways"])), 2);
}

#[test]
fn tampered_plan_is_rejected() {
    let s = Scratch::new();
    let inst = s.file("ex.json", EXAMPLE);
    let out = run(&[&"check-order", &inst]);
    let mut doc = json(&out)["plan"].clone();
    doc["pi"][1][0] = "1/8".into();
    doc["pi"][1][1] = "1/8".into();
    let plan = s.file("plan.json", &doc.to_string());
    let out = run(&[&"verify-plan", &inst, &plan]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["valid"], false);
}

#[test]
fn verify_exit_codes() {
    let empty = run(&[&"verify", &"--count", &"0"]);
    assert_eq!(code(&empty), 0);
    assert_eq!(json(&empty)["failures"], serde_json::json!([]));
    let mutated = run(&[&"--format", &"text", &"verify", &"--count", &"12", &"--mutate"]);
    assert_ne!(code(&mutated), 0);
    assert!(String::from_utf8_lossy(&mutated.stdout).contains("FAIL"));
}

#[test]
fn acceptance_run_passes() {
    let out = run(&[&"--format", &"text", &"verify", &"--seed", &"42", &"--count", &"50"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{text}");
    assert!(text.contains("failures: 0"));
}

#[test]
fn out_flag_writes_the_payload() {
    let s = Scratch::new();
    let target = s.path("verdict.txt");
    let out = run(&[&"--format", &"text", &"--out", &target, &"check-order", &s.file("ex.json", EXAMPLE)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(Path::new(&target)).unwrap().starts_with("ordered"));
}
