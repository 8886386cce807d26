use std::path::PathBuf;
use std::process::{Command, Output};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn epinorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epinorm"))
        .args(args)
        .env_remove("EPINORM_DEPTH")
        .output()
        .expect("run epinorm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

#[test]
fn flipping_after_two_tails() {
    let o = epinorm(&["scenario", "flipping", "--tails-seen", "2", "believe"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "3 4 5 6 7 8 9\n");
}

#[test]
fn check_passes_on_seven_state_model() {
    let o = epinorm(&["check", &model("equal_likeliness.model")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for check in ["prior", "axioms", "threshold", "invariants"] {
        assert!(out.lines().any(|l| l.starts_with(&format!("{check}\tpass"))), "{out}");
    }
}

#[test]
fn discovery_shifts_belief_line() {
    let o = epinorm(&["discover", &model("flipping.model"), "--at", "2@1..", "--learn", "{2,3,...}"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let believed: Vec<&str> = out.lines().skip(1).map(|l| l.split('\t').nth(2).unwrap()).collect();
    assert_eq!(believed, vec!["1 2 3 4 5 6 7", "2 3 4 5 6 7 8"]);
}

#[test]
fn learning_within_seven_shrinks_belief() {
    let o = epinorm(&["discover", &model("flipping.model"), "--at", "1@1..", "--learn", "1..7"]);
    let out = stdout(&o);
    assert_eq!(out.lines().last().unwrap().split('\t').nth(2), Some("1 2 3 4 5 6"));
}

#[test]
fn output_formats() {
    let m = model("equal_likeliness.model");
    let o = epinorm(&["believe", &m, "--at", "3@low", "--format", "json"]);
    assert_eq!(stdout(&o), "{\"believed\":[\"1\",\"2\"]}\n");
    let o = epinorm(&["believe", &m, "--format", "csv"]);
    assert_eq!(stdout(&o), "evidence,believed\nlow,1 2\nhigh,4 5 6 7\n");
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("epinorm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.model");
    std::fs::write(&bad, "states: a b\nprior: a=.5 b=.49\nthreshold: .5\n").unwrap();
    let o = epinorm(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains(":2:8: error: prior mass 99/100 ≠ 1"), "{err}");

    let o = epinorm(&["know", &model("equal_likeliness.model"), "--at", "9@low"]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn racing_table_is_deterministic() {
    let a = epinorm(&["table", "racing", "--t", ".75"]);
    let b = epinorm(&["table", "racing", "--t", ".75"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert_eq!(out.lines().count(), 6);
    assert!(out.contains("how long until over\tends on trial 4\t.75\t2\t50\t3\t6\tmaybe"), "{out}");
}

#[test]
fn depth_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_epinorm"))
        .args(["scenario", "flipping", "typicality"])
        .env("EPINORM_DEPTH", "10")
        .output()
        .unwrap();
    assert!(o.status.success());
    // header plus flips 1..=10; the tail state is not listed
    assert_eq!(stdout(&o).lines().count(), 11);
}

#[test]
fn lottery_contrast() {
    let o = epinorm(&["scenario", "lottery", "--entrants", "1001"]);
    assert_eq!(stdout(&o), "rule\tknows alice loses\nsufficiency\ttrue\nsufficiency-plus\tfalse\n");
}

#[test]
fn render_round_trips() {
    let o = epinorm(&["render", &model("equal_likeliness.model")]);
    let text = stdout(&o);
    assert!(text.starts_with("states: 1 2 3 4 5 6 7\n"), "{text}");
}
