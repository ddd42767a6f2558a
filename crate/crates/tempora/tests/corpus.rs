//! Closed-corpus checks: every shipped tree typechecks, every lemma
//! resolves, and the batch runner is deterministic.

use std::path::{Path, PathBuf};

use tempora::harness::{run_suite, Outcome};
use tempora::lexicon::Lexicon;
use tempora::prover::SaturationBudget;
use tempora::syntax::{read_tree, typecheck};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

#[test]
fn every_shipped_tree_typechecks() {
    let trees_dir = repo_root().join("suite/trees");
    let mut count = 0;
    let mut files: Vec<PathBuf> =
        std::fs::read_dir(&trees_dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    for path in files {
        let text = std::fs::read_to_string(&path).unwrap();
        let raw = read_tree(&text)
            .unwrap_or_else(|e| panic!("{} does not read: {e}", path.display()));
        // Typechecking resolves every lexeme, so this is also the
        // closed-corpus completeness check for the lexicon.
        typecheck(&raw, Lexicon::builtin())
            .unwrap_or_else(|e| panic!("{} does not typecheck: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 38, "expected the full tree corpus, found {count}");
}

#[test]
fn suite_runs_are_deterministic() {
    let suite = repo_root().join("suite/temporal.suite");
    let budget = SaturationBudget::default();
    let a = run_suite(&suite, &budget).unwrap();
    let b = run_suite(&suite, &budget).unwrap();
    let verdicts = |r: &tempora::harness::RunReport| -> Vec<(String, String)> {
        r.entries
            .iter()
            .map(|e| {
                let got = match &e.got {
                    Outcome::Answer(x) => x.to_string(),
                    Outcome::Error(m) => format!("error: {m}"),
                };
                (e.id.clone(), got)
            })
            .collect()
    };
    assert_eq!(verdicts(&a), verdicts(&b));
    assert_eq!(a.accuracy, b.accuracy);
    assert_eq!(a.regressions, b.regressions);
}
