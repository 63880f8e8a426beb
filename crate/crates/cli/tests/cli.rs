use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn scottbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scottbench")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = scottbench(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn word_problem_on_empty_word() {
    assert_eq!(stdout(&["wp", "--structure", &fixture("dinf.json"), "--word", "b a b b a b"]), "e, length 0\n");
    assert_eq!(stdout(&["wp", "--structure", &fixture("dinf.json"), "--word", "a a b"]), "b, length 1\n");
}

#[test]
fn orbit_verdicts() {
    let dinf = fixture("dinf.json");
    assert_eq!(stdout(&["orbit", "--structure", &dinf, "--tuple", "a, a b a"]), "IN-ORBIT witness=[pc_a_b]\n");
    assert_eq!(stdout(&["orbit", "--structure", &dinf, "--tuple", "a b a, b a b"]), "NOT-IN-ORBIT bound=7\n");
    assert!(stdout(&["orbit", "--structure", &fixture("z2.json"), "--tuple", "(2,1), (1,1)"]).starts_with("IN-ORBIT"));
    assert!(stdout(&["orbit", "--structure", &fixture("f2.json"), "--tuple", "a^2, b"]).starts_with("NOT-IN-ORBIT"));
}

#[test]
fn plane_queries() {
    assert_eq!(stdout(&["plane", "--query", "stage((A1 v A2) ^ (B1 v B2))"]), "2\n");
    assert_eq!(stdout(&["plane", "--query", "incident(A1, A1 v A2)"]), "true\n");
    assert_eq!(stdout(&["plane", "--query", "incident(B1, A1 v A2)"]), "false\n");
    assert_eq!(
        stdout(&["plane", "--query", "census(3)"]),
        "stage 0: 4 points, 0 lines\nstage 1: 0 points, 6 lines\nstage 2: 3 points, 0 lines\nstage 3: 0 points, 3 lines\n"
    );
}

#[test]
fn theta_document_matches_golden() {
    let doc = stdout(&["theta", "--structure", &fixture("dinf.json"), "--conjuncts", "6"]);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/theta_dinf_6.json");
    if std::env::var_os("SCOTT_BLESS").is_some() {
        std::fs::write(&golden, &doc).unwrap();
    }
    assert_eq!(doc, std::fs::read_to_string(golden).unwrap());
}

#[test]
fn artifacts_are_independent_of_jobs_and_embed_the_hash() {
    let one = stdout(&["--jobs", "1", "scott", "--structure", &fixture("dinf.json"), "--conjuncts", "12", "--terms", "6"]);
    let four = stdout(&["--jobs", "4", "scott", "--structure", &fixture("dinf.json"), "--conjuncts", "12", "--terms", "6"]);
    assert_eq!(one, four);
    let value: serde_json::Value = serde_json::from_str(&one).unwrap();
    assert_eq!(value["metadata"]["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(value["metadata"]["kind"], "scott");
    let plane = stdout(&["theta", "--structure", &fixture("plane.json"), "--conjuncts", "1"]);
    let value: serde_json::Value = serde_json::from_str(&plane).unwrap();
    assert!(value["metadata"]["presentation_note"].is_string());
}

#[test]
fn resume_reproduces_a_longer_run() {
    let dinf = fixture("dinf.json");
    let short = scratch("short.json");
    let resumed = scratch("resumed.json");
    stdout(&["theta", "--structure", &dinf, "--conjuncts", "5", "--out", short.to_str().unwrap()]);
    stdout(&[
        "theta",
        "--structure",
        &dinf,
        "--conjuncts",
        "7",
        "--resume",
        short.to_str().unwrap(),
        "--out",
        resumed.to_str().unwrap(),
    ]);
    let full = stdout(&["theta", "--structure", &dinf, "--conjuncts", "12"]);
    assert_eq!(std::fs::read_to_string(resumed).unwrap(), full);
    let mismatch = scottbench(&["theta", "--structure", &fixture("v4.json"), "--resume", short.to_str().unwrap()]);
    assert_eq!(mismatch.status.code(), Some(1));
}

#[test]
fn check_separates_the_finite_quotient() {
    let doc = scratch("theta40.json");
    stdout(&["theta", "--structure", &fixture("dinf.json"), "--conjuncts", "40", "--out", doc.to_str().unwrap()]);
    let doc = doc.to_str().unwrap();
    let v4 = fixture("v4.json");
    assert_eq!(
        stdout(&["check", "--formula", doc, "--target", &v4, "--tuple", "a, b", "--exact"]),
        "REFUTED conjunct=11 witness=(b, a)\n"
    );
    assert_eq!(
        stdout(&["check", "--formula", doc, "--target", &fixture("dinf.json"), "--tuple", "a, a b a", "--depth", "4"]),
        "HOLDS-SO-FAR depth=4\n"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(scottbench(&["bogus"]).status.code(), Some(2));
    assert_eq!(scottbench(&["orbit", "--structure", &fixture("dinf.json")]).status.code(), Some(2));
    assert_eq!(scottbench(&["wp", "--structure", &fixture("bad.json"), "--word", "a"]).status.code(), Some(1));
    assert_eq!(scottbench(&["wp", "--structure", &fixture("dinf.json"), "--word", "a z"]).status.code(), Some(1));
    let budget = scottbench(&["orbit", "--structure", &fixture("dinf.json"), "--tuple", "a b a, b a b", "--budget", "3"]);
    assert_eq!(budget.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&budget.stderr).starts_with("budget exhausted"));
    assert_eq!(scottbench(&["plane", "--query", "volume(A1)"]).status.code(), Some(1));
}

#[test]
fn selftest_is_seeded_and_passes() {
    let a = stdout(&["selftest", "--samples", "40", "--seed", "7"]);
    assert_eq!(a, stdout(&["selftest", "--samples", "40", "--seed", "7"]));
    assert_eq!(a.lines().filter(|l| l.starts_with("PASS")).count(), 4);
}
