use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    p.to_string_lossy().into_owned()
}

fn gradalg(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gradalg"));
    c.args(args).env_remove("GRADALG_BUDGET");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = gradalg(args, &[]);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

fn scratch(name: &str, contents: &[u8]) -> String {
    let dir = std::env::temp_dir().join(format!("gradalg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn decide_equal_presentations_uses_identity_shift() {
    let (code, v) = run(&["decide", &fixture("klein_full.json"), "--a", "A", "--b", "A"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["trace"]["shift"], 0);
}

#[test]
fn negative_verdict_exits_with_two() {
    let (code, v) = run(&["decide", &fixture("klein_full.json"), "--a", "A", "--b", "M1"]);
    assert_eq!(code, 2);
    assert_eq!(v["verdict"], false);
    assert_eq!(v["trace"]["d"], 2);
}

#[test]
fn construct_full_support_klein_and_reverify() {
    let out = gradalg(&["construct", &fixture("klein_full.json"), "--a", "A", "--b", "M2"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let cert = &v["construction"]["certificate"];
    for k in ["graded", "multiplicative", "injective", "unital"] {
        assert_eq!(cert[k], true, "{k}");
    }
    let report = scratch("construct.json", &out.stdout);
    let (code, w) = run(&["verify", &fixture("klein_full.json"), "--a", "A", "--b", "M2", "--hom", &report]);
    assert_eq!(code, 0);
    assert_eq!(&w["certificate"], cert);
}

#[test]
fn wrong_target_fails_verification() {
    let out = gradalg(&["construct", &fixture("klein_regular.json"), "--a", "A", "--b", "Regular"], &[]);
    let report = scratch("regular.json", &out.stdout);
    let (code, v) = run(&["verify", &fixture("klein_full.json"), "--a", "A", "--b", "M2", "--hom", &report]);
    assert_eq!(code, 2, "{v}");
    assert_eq!(v["embedding"], false);
    assert_eq!(v["certificate"]["graded"], false);
    let (code, v) = run(&["verify", &fixture("klein_full.json"), "--a", "A", "--b", "M1", "--hom", &report]);
    assert_eq!(code, 1, "{v}");
    assert_eq!(v["error"]["code"], "cli.validation");
}

#[test]
fn construct_negative_reports_separator() {
    let (code, v) = run(&["construct", &fixture("klein_regular.json"), "--a", "A", "--b", "Short"]);
    assert_eq!(code, 2);
    assert_eq!(v["separation"]["status"], "verified");
    assert_eq!(v["separation"]["case"], "elementary_nonabelian");
    assert_eq!(v["separation"]["in_b"]["holds"], true);
    assert_eq!(v["separation"]["in_a"]["holds"], false);
}

#[test]
fn identity_inclusion_on_sub_tuple() {
    let (code, v) = run(&["identity-inclusion", &fixture("klein_full.json"), "--a", "A", "--b", "A2", "--max-len", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["holds"], true);
    assert_eq!(v["max_len"], 3);
    let (code, v) = run(&["identity-inclusion", &fixture("klein_full.json"), "--a", "A2", "--b", "A", "--max-len", "3"]);
    assert_eq!(code, 2);
    assert!(v["violation"]["polynomial"].is_object());
}

#[test]
fn budget_variable_caps_evaluations() {
    let out = gradalg(
        &["identity-inclusion", &fixture("klein_full.json"), "--a", "A", "--b", "A2", "--max-len", "3"],
        &[("GRADALG_BUDGET", "1")],
    );
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["code"], "identities.budget_exceeded");
}

#[test]
fn envelope_round_trip() {
    let (code, v) = run(&["envelope", &fixture("klein_full.json"), "--b", "A2", "--cocycle", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["round_trip"]["bijective"], true);
    assert_eq!(v["psi_certificate"]["multiplicative"], true);
    // the twisted Klein cocycle squared is trivial
    assert_eq!(v["presentation"]["alpha"]["values"][1][2]["coeffs"][0][0], "1");
}

#[test]
fn z10_power_embedding() {
    let out = gradalg(&["semisimple-embed", &fixture("z10_power.json"), "--a", "A1,A2", "--b", "B"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["source_dim"], 32);
    assert_eq!(v["target_dim"], 50);
    assert_eq!(v["minimal_a"]["kept"], serde_json::json!(["A1", "A2"]));
    assert_eq!(v["blocks_orthogonal"], true);
    let report = scratch("power.json", &out.stdout);
    let (code, w) =
        run(&["verify", &fixture("z10_power.json"), "--a", "A1,A2", "--b", "B", "--power", "2", "--hom", &report]);
    assert_eq!(code, 0);
    assert_eq!(w["certificate"], v["certificate"]);
}

#[test]
fn invalid_cocycle_names_the_triple() {
    let (code, v) = run(&["run", &fixture("invalid_cocycle.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["path"], "presentations.A.alpha");
    assert!(v["error"]["reason"].as_str().unwrap().contains("(0, 0, 1)"));
}

#[test]
fn fixture_jobs_run() {
    let (code, v) = run(&["run", &fixture("z10_power.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["jobs"].as_array().unwrap().len(), 4);
    let (code, v) = run(&["run", &fixture("klein_regular.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["jobs"][0]["report"]["construction"]["certificate"]["injective"], true);
}

#[test]
fn malformed_input_is_an_error() {
    let p = scratch("broken.json", b"{\"version\": ");
    let (code, v) = run(&["decide", &p, "--a", "A", "--b", "B"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["code"], "cli.parse");
    let (code, v) = run(&["decide", &fixture("z10_power.json"), "--a", "A1", "--b", "Nope"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["path"], "arguments.b");
}

#[test]
fn corpus_run_is_deterministic() {
    let args = ["corpus-run", "--seed", "5", "--count", "24", "--workers"];
    let one = gradalg(&[&args[..], &["1"]].concat(), &[]);
    let four = gradalg(&[&args[..], &["4"]].concat(), &[]);
    assert_eq!(one.status.code(), Some(0), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["summary"]["instances"], 24);
    assert_eq!(v["summary"]["unsound"], 0);
    let ids: Vec<u64> = v["instances"].as_array().unwrap().iter().map(|o| o["instance"]["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, (0..24).collect::<Vec<_>>());
    let other = gradalg(&["corpus-run", "--seed", "6", "--count", "24"], &[]);
    assert_ne!(one.stdout, other.stdout);
}

#[test]
fn timings_only_on_request() {
    let (_, v) = run(&["decide", &fixture("klein_full.json"), "--a", "A", "--b", "A"]);
    assert!(v.get("timings_ms").is_none());
    let (_, v) = run(&["--timings", "decide", &fixture("klein_full.json"), "--a", "A", "--b", "A"]);
    assert!(v["timings_ms"]["total"].is_number());
}
