use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SIGMA: &str = r#"{"sequent": "(~X | ~Y)", "plays": [["[dag]", "[(dag | dag)]", "[(atom(~X,x) | dag)]", "[(atom(~X,x) | atom(~Y,y))]"]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mallgames"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn build_game_writes_dot_with_eight_nodes() {
    let dir = TempDir::new().unwrap();
    let dot = dir.path().join("g.dot");
    let o = run(&["build-game", "((X * ~X) & Y)", "--dot", &path_str(&dot)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = fs::read_to_string(&dot).unwrap();
    let nodes = text.lines().filter(|l| l.contains("label=") && !l.contains("->")).count();
    assert_eq!(nodes, 8, "{text}");
    assert!(stdout(&o).contains('8'));
}

#[test]
fn build_game_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.json");
    let o = run(&["build-game", "(X * Y)", "--json", &path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let doc: mallgames::export::GameDoc = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let g = mallgames::export::game_from_doc(&doc).unwrap();
    assert_eq!(g.vertex_count(), 5);
    assert!(mallgames::homotopy::check_game_axioms(&g).is_empty());
}

#[test]
fn missing_input_is_a_usage_error() {
    let o = run(&["check-proof", "/nonexistent/missing.proof"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_and_invalid_proofs() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.proof", "ax(0,");
    assert_eq!(run(&["check-proof", &bad]).status.code(), Some(2));
    let wrong = write(&dir, "wrong.proof", "ax(0,1) : |- X, Y");
    assert_eq!(run(&["check-proof", &wrong]).status.code(), Some(1));
    let good = write(&dir, "good.proof", "par(0, ax(0,1)) : |- (~X | X)");
    assert_eq!(run(&["check-proof", &good]).status.code(), Some(0));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn retraction_of_sigma_lists_its_fixpoints() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "sigma.json", SIGMA);
    let o = run(&["retraction", &s]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    for p in ["†", "†⅋†", "x*⅋†", "x*⅋y*", "⊤"] {
        assert!(out.contains(p), "{p} missing from {out}");
    }
    assert!(out.contains("retraction: holds"));
}

#[test]
fn check_reports_failing_properties_with_status_one() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "sigma.json", SIGMA);
    let o = run(&["check", &s]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("receptive"));
}

#[test]
fn focus_splits_copycat_into_two_phases() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "cc.proof", "ax(0,1) : |- ~X, X");
    let o = run(&["focus", &p]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[O: x*, †][P: x*, x]"), "{}", stdout(&o));
}

#[test]
fn search_blass_writes_a_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("blass.json");
    let o = run(&["search-blass", "--bound", "5", "--report", &path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v.to_string().contains("(X * ~X)"), "{v}");
}

#[test]
fn empty_corpus_succeeds() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "empty.json", "{}");
    let o = run(&["run-corpus", &c]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn unknown_corpus_field_is_rejected() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "bad.json", r#"{"gmaes": []}"#);
    assert_eq!(run(&["run-corpus", &c]).status.code(), Some(2));
}
