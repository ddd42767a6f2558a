//! End-to-end checks of the command-line surface: exit codes, verdict
//! output, the report formats, and the dumped logical forms.

use std::path::{Path, PathBuf};
use std::process::Command;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tempora"));
    cmd.current_dir(repo_root());
    cmd
}

#[test]
fn check_prints_the_verdict() {
    let out = bin()
        .args(["check", "suite/trees/p279_p1.tree", "suite/trees/p279_h.tree"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "No");
}

#[test]
fn check_honors_now_for_relative_adverbs() {
    let out = bin()
        .args([
            "check",
            "suite/trees/p260_p1.tree",
            "suite/trees/p260_h.tree",
            "--now",
            "1990-07-14",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "Yes");
}

#[test]
fn usage_errors_exit_with_the_clap_code() {
    let out = bin().arg("check").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_distinctly() {
    let out = bin().args(["check", "no/such/file.tree"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no/such/file.tree"));
}

#[test]
fn suite_exits_clean_and_emits_json() {
    let out = bin().args(["suite", "suite/temporal.suite"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("fracas-279"));
    assert!(table.contains("accuracy 1.000"));

    let out = bin().args(["suite", "suite/temporal.suite", "--json"]).output().unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["supported_total"], 9);
    assert_eq!(report["supported_correct"], 9);
    assert!(report["entries"].as_array().unwrap().len() >= 15);
}

#[test]
fn dump_lf_matches_the_recorded_forms() {
    let root = repo_root();
    for (args, golden) in [
        (
            vec!["dump-lf", "suite/trees/p279_p1.tree", "suite/trees/p279_h.tree"],
            "suite/golden/p279_refutation.txt",
        ),
        (vec!["dump-lf", "suite/trees/p279_p1.tree"], "suite/golden/p279_p1.txt"),
    ] {
        let out = bin().args(&args).output().unwrap();
        assert!(out.status.success());
        let produced = String::from_utf8_lossy(&out.stdout).to_string();
        let golden_text = std::fs::read_to_string(root.join(golden)).unwrap();
        let a = tempora::logic::text::parse_formula(&produced).unwrap();
        let b = tempora::logic::text::parse_formula(&golden_text).unwrap();
        let norm = |f: &tempora::logic::Formula| {
            tempora::logic::text::tokens(&tempora::logic::print_formula(
                &tempora::logic::alpha_normalize(f),
            ))
        };
        assert_eq!(norm(&a), norm(&b), "dump-lf diverges from {golden}");
    }
}

#[test]
fn trace_replays_the_proof() {
    let out = bin()
        .args(["trace", "suite/trees/p279_p1.tree", "suite/trees/p279_h.tree"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("apply-unicity"));
    assert!(text.contains("arithmetic-refutation"));
    assert!(text.trim_end().ends_with("verdict: No"));
}

#[test]
fn budget_flag_is_accepted() {
    let out = bin()
        .args([
            "check",
            "suite/trees/p279_p1.tree",
            "suite/trees/p279_h.tree",
            "--budget",
            "200,8,2000",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "No");
}
