//! Suite files, the batch runner, and the accuracy report.
//!
//! A suite file is a plain-text sequence of blank-line-separated records:
//!
//! ```text
//! id: fracas-279
//! expected: no
//! status: supported
//! note: repeatable accomplishment, pronoun fixes the object
//! premise: trees/p279_p1.tree
//! hypothesis: trees/p279_h.tree
//! ```
//!
//! `premise` lines repeat and give a path relative to the suite file or an
//! inline tree (anything starting with `(`). `now` pins the utterance date
//! for problems whose premises fix it ("Today is ..."). `status` is
//! `supported`, `aspirational` (run and reported, not gating), or
//! `known-unsupported` (documented failures, excluded from accuracy).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::axioms::generate_axioms;
use crate::lexicon::{date_to_day, Lexicon, TimePoint};
use crate::prover::{decide, Answer, SaturationBudget};
use crate::syntax::{read_tree, typecheck, TypedTree};

/// Gate status of a suite entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryStatus {
    Supported,
    Aspirational,
    KnownUnsupported,
}

impl EntryStatus {
    fn parse(s: &str) -> Option<EntryStatus> {
        match s {
            "supported" => Some(EntryStatus::Supported),
            "aspirational" => Some(EntryStatus::Aspirational),
            "known-unsupported" => Some(EntryStatus::KnownUnsupported),
            _ => None,
        }
    }
}

/// A premise or hypothesis tree: a file reference or inline text.
#[derive(Clone, Debug)]
pub enum TreeSource {
    File(PathBuf),
    Inline(String),
}

/// One suite record.
#[derive(Clone, Debug)]
pub struct SuiteEntry {
    pub id: String,
    pub expected: Answer,
    pub status: EntryStatus,
    pub now: Option<TimePoint>,
    pub note: Option<String>,
    pub premises: Vec<TreeSource>,
    pub hypothesis: TreeSource,
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("suite record {record} ({id}): {msg}")]
    Record { record: usize, id: String, msg: String },
}

/// What an entry produced.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Answer(Answer),
    Error(String),
}

impl Outcome {
    pub fn matches(&self, expected: Answer) -> bool {
        matches!(self, Outcome::Answer(a) if *a == expected)
    }
}

/// Per-entry result.
#[derive(Clone, Debug, Serialize)]
pub struct EntryResult {
    pub id: String,
    pub status: EntryStatus,
    pub expected: Answer,
    pub got: Outcome,
    pub millis: u128,
    pub note: Option<String>,
}

/// The batch report: per-entry results ordered by id, accuracy over the
/// supported entries, and the list of supported mismatches.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub entries: Vec<EntryResult>,
    pub supported_total: usize,
    pub supported_correct: usize,
    pub accuracy: Option<f64>,
    pub regressions: Vec<String>,
}

impl RunReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<14} {:<18} {:<9} {:<9} {:>8}",
            "id", "status", "expected", "got", "ms"
        );
        for e in &self.entries {
            let got = match &e.got {
                Outcome::Answer(a) => a.to_string(),
                Outcome::Error(_) => "Error".to_string(),
            };
            let mark = match e.status {
                EntryStatus::Supported => {
                    if e.got.matches(e.expected) {
                        "ok"
                    } else {
                        "MISMATCH"
                    }
                }
                EntryStatus::Aspirational => {
                    if e.got.matches(e.expected) {
                        "ok (aspirational)"
                    } else {
                        "miss (aspirational)"
                    }
                }
                EntryStatus::KnownUnsupported => {
                    if e.got.matches(e.expected) {
                        "ok (unsupported)"
                    } else {
                        "miss (unsupported)"
                    }
                }
            };
            let status = match e.status {
                EntryStatus::Supported => "supported",
                EntryStatus::Aspirational => "aspirational",
                EntryStatus::KnownUnsupported => "known-unsupported",
            };
            let _ = writeln!(
                out,
                "{:<14} {:<18} {:<9} {:<9} {:>8}  {}",
                e.id, status, e.expected, got, e.millis, mark
            );
        }
        let accuracy = match self.accuracy {
            Some(a) => format!("{:.3}", a),
            None => "n/a".to_string(),
        };
        let _ = writeln!(
            out,
            "supported: {}/{} correct, accuracy {}",
            self.supported_correct, self.supported_total, accuracy
        );
        if !self.regressions.is_empty() {
            let _ = writeln!(out, "regressions: {}", self.regressions.join(", "));
        }
        out
    }
}

/// Parse a suite file's text. `base` resolves relative tree paths.
pub fn parse_suite(text: &str, base: &Path) -> Result<Vec<SuiteEntry>, SuiteError> {
    let mut entries = Vec::new();
    let mut record_no = 0usize;
    for block in text.split("\n\n") {
        let lines: Vec<&str> = block
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if lines.is_empty() {
            continue;
        }
        record_no += 1;
        let mut id = String::new();
        let mut expected = None;
        let mut status = EntryStatus::Supported;
        let mut now = None;
        let mut note = None;
        let mut premises = Vec::new();
        let mut hypothesis = None;
        let err = |id: &str, msg: String| SuiteError::Record {
            record: record_no,
            id: id.to_string(),
            msg,
        };
        for line in lines {
            let Some((field, value)) = line.split_once(':') else {
                return Err(err(&id, format!("malformed line: {line}")));
            };
            let value = value.trim();
            match field.trim() {
                "id" => id = value.to_string(),
                "expected" => {
                    expected =
                        Some(value.parse::<Answer>().map_err(|e| err(&id, e))?)
                }
                "status" => {
                    status = EntryStatus::parse(value)
                        .ok_or_else(|| err(&id, format!("bad status: {value}")))?
                }
                "now" => now = Some(parse_date_field(value).map_err(|e| err(&id, e))?),
                "note" => note = Some(value.to_string()),
                "premise" => premises.push(tree_source(value, base)),
                "hypothesis" => hypothesis = Some(tree_source(value, base)),
                other => return Err(err(&id, format!("unknown field: {other}"))),
            }
        }
        if id.is_empty() {
            return Err(err("?", "missing id".into()));
        }
        let expected = expected.ok_or_else(|| err(&id, "missing expected".into()))?;
        let hypothesis = hypothesis.ok_or_else(|| err(&id, "missing hypothesis".into()))?;
        entries.push(SuiteEntry { id, expected, status, now, note, premises, hypothesis });
    }
    Ok(entries)
}

fn parse_date_field(s: &str) -> Result<TimePoint, String> {
    let parts: Vec<&str> = s.split('-').collect();
    if parts.len() != 3 {
        return Err(format!("bad date: {s}"));
    }
    let y: i32 = parts[0].parse().map_err(|_| format!("bad date: {s}"))?;
    let m: u32 = parts[1].parse().map_err(|_| format!("bad date: {s}"))?;
    let d: u32 = parts[2].parse().map_err(|_| format!("bad date: {s}"))?;
    date_to_day(y, m, d).map_err(|e| e.to_string())
}

fn tree_source(value: &str, base: &Path) -> TreeSource {
    if value.starts_with('(') {
        TreeSource::Inline(value.to_string())
    } else {
        TreeSource::File(base.join(value))
    }
}

fn load_tree(source: &TreeSource, lexicon: &Lexicon) -> Result<TypedTree, String> {
    let text = match source {
        TreeSource::Inline(t) => t.clone(),
        TreeSource::File(path) => fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?,
    };
    let raw = read_tree(&text).map_err(|e| e.to_string())?;
    typecheck(&raw, lexicon).map_err(|e| e.to_string())
}

/// Run one entry; errors become `Outcome::Error`, never a crash.
pub fn run_entry(entry: &SuiteEntry, budget: &SaturationBudget) -> EntryResult {
    let lexicon = Lexicon::builtin();
    let started = Instant::now();
    let got = (|| -> Result<Answer, String> {
        let mut premises = Vec::new();
        for p in &entry.premises {
            premises.push(load_tree(p, lexicon)?);
        }
        let hypothesis = load_tree(&entry.hypothesis, lexicon)?;
        let problem =
            crate::semantics::interpret_problem(&premises, &hypothesis, entry.now, lexicon)
                .map_err(|e| e.to_string())?;
        let axioms = generate_axioms(&problem, lexicon);
        let verdict = decide(&problem, &axioms, budget).map_err(|e| e.to_string())?;
        Ok(verdict.answer)
    })();
    EntryResult {
        id: entry.id.clone(),
        status: entry.status,
        expected: entry.expected,
        got: match got {
            Ok(a) => Outcome::Answer(a),
            Err(e) => Outcome::Error(e),
        },
        millis: started.elapsed().as_millis(),
        note: entry.note.clone(),
    }
}

/// Run a suite file and collect the report. Supported entries feed the
/// accuracy figure; the others are executed and reported alongside.
pub fn run_suite(path: &Path, budget: &SaturationBudget) -> Result<RunReport, SuiteError> {
    let text = fs::read_to_string(path)
        .map_err(|e| SuiteError::Io { path: path.to_path_buf(), source: e })?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let entries = parse_suite(&text, &base)?;
    // Missing tree files surface at parse time with the file named.
    for entry in &entries {
        for source in entry.premises.iter().chain([&entry.hypothesis]) {
            if let TreeSource::File(p) = source {
                if !p.exists() {
                    return Err(SuiteError::Record {
                        record: 0,
                        id: entry.id.clone(),
                        msg: format!("missing tree file: {}", p.display()),
                    });
                }
            }
        }
    }
    let mut results: Vec<EntryResult> =
        entries.iter().map(|e| run_entry(e, budget)).collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    let supported: Vec<&EntryResult> =
        results.iter().filter(|r| r.status == EntryStatus::Supported).collect();
    let supported_total = supported.len();
    let supported_correct = supported.iter().filter(|r| r.got.matches(r.expected)).count();
    let regressions: Vec<String> = supported
        .iter()
        .filter(|r| !r.got.matches(r.expected))
        .map(|r| r.id.clone())
        .collect();
    let accuracy = if supported_total == 0 {
        None
    } else {
        Some(supported_correct as f64 / supported_total as f64)
    };
    Ok(RunReport {
        entries: results,
        supported_total,
        supported_correct,
        accuracy,
        regressions,
    })
}
