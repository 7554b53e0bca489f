use std::path::PathBuf;
use std::process::{Command, Output};

fn keane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keane")).args(args).output().unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("keane-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn params_round_trip_through_file() {
    let out = keane(&["params", "--rule", "appendix", "--K", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let file = scratch("appendix.json", std::str::from_utf8(&out.stdout).unwrap());
    let again = keane(&["params", "--file", file.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn invalid_sequences_exit_2() {
    let file = scratch("bad.json", r#"{"rule":"explicit","pairs":[[0,10]]}"#);
    assert_eq!(keane(&["params", "--file", file.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(keane(&["dimension", "--rule", "alpha2", "--direction", "2", "--K", "2"]).status.code(), Some(2));
    assert_eq!(keane(&["dimension", "--direction", "5", "--K", "2"]).status.code(), Some(2));
    assert_eq!(keane(&["params", "--rule", "flipzz", "--K", "2"]).status.code(), Some(2));
}

#[test]
fn config_rejects_unknown_and_misplaced_keys() {
    let unknown = scratch("unknown.json", r#"{"command":"generic","k":1,"eps":"1/10","colour":"red"}"#);
    assert_eq!(keane(&["--config", unknown.to_str().unwrap()]).status.code(), Some(2));
    let misplaced = scratch("misplaced.json", r#"{"command":"params","K":2,"seed":4}"#);
    assert_eq!(keane(&["--config", misplaced.to_str().unwrap()]).status.code(), Some(2));
    let good = scratch("good.json", r#"{"command":"generic","k":1,"eps":"1/10"}"#);
    let via_config = keane(&["--config", good.to_str().unwrap()]);
    let via_flags = keane(&["generic", "--k", "1", "--eps", "1/10"]);
    assert_eq!(via_config.status.code(), Some(0));
    assert_eq!(via_config.stdout, via_flags.stdout);
}

#[test]
fn step_budget_exits_3_with_partial_records() {
    let out = Command::new(env!("CARGO_BIN_EXE_keane"))
        .args(["recurrence", "--K", "3", "--N", "1000", "--alpha", "1/2", "--seed", "1"])
        .env("KEANE_STEP_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("0,")).count(), 100);
    assert!(text.contains("# truncated"));
}

#[test]
fn verify_reports_no_failures_on_the_default_rule() {
    let out = keane(&["verify", "--K-max", "2", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("lemma_id,k,verdict,bound,enclosure_lo,enclosure_hi,margin\n"));
    assert_eq!(csv.lines().count(), 1 + 16 * 3);
    assert!(!csv.contains(",FAIL,"));
}
