use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tempora::harness::run_suite;
use tempora::lexicon::{date_to_day, Lexicon, TimePoint};
use tempora::logic::print_formula;
use tempora::prover::SaturationBudget;
use tempora::semantics::{refutation_form, sentence_form, InterpretedProblem};

/// Temporal entailment over grammatical syntax trees.
#[derive(Parser)]
#[command(name = "tempora", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide entailment: every tree but the last is a premise, the last is
    /// the hypothesis. Prints Yes, No, or Unknown.
    Check {
        /// Tree files (premises..., hypothesis).
        #[arg(required = true, num_args = 1..)]
        trees: Vec<PathBuf>,
        /// Utterance date, YYYY-MM-DD.
        #[arg(long)]
        now: Option<String>,
        /// Saturation budget: INSTANTIATIONS,SPLITS,MILLIS.
        #[arg(long)]
        budget: Option<SaturationBudget>,
    },
    /// Run a suite file and print the report.
    Suite {
        file: PathBuf,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        budget: Option<SaturationBudget>,
    },
    /// Print the logical form. One tree prints that sentence's form; with
    /// more, the last is the hypothesis and the refutation form is printed.
    DumpLf {
        #[arg(required = true, num_args = 1..)]
        trees: Vec<PathBuf>,
        #[arg(long)]
        now: Option<String>,
    },
    /// Decide entailment and print the proof trace.
    Trace {
        #[arg(required = true, num_args = 1..)]
        trees: Vec<PathBuf>,
        #[arg(long)]
        now: Option<String>,
        #[arg(long)]
        budget: Option<SaturationBudget>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn parse_now(now: &Option<String>) -> Result<Option<TimePoint>, String> {
    match now {
        None => Ok(None),
        Some(s) => {
            let parts: Vec<&str> = s.split('-').collect();
            if parts.len() != 3 {
                return Err(format!("--now expects YYYY-MM-DD, got {s}"));
            }
            let y: i32 = parts[0].parse().map_err(|_| format!("bad date: {s}"))?;
            let m: u32 = parts[1].parse().map_err(|_| format!("bad date: {s}"))?;
            let d: u32 = parts[2].parse().map_err(|_| format!("bad date: {s}"))?;
            Ok(Some(date_to_day(y, m, d).map_err(|e| e.to_string())?))
        }
    }
}

fn load_problem(
    trees: &[PathBuf],
    now: Option<TimePoint>,
) -> Result<InterpretedProblem, String> {
    let lexicon = Lexicon::builtin();
    let mut typed = Vec::new();
    for path in trees {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let raw = tempora::syntax::read_tree(&text).map_err(|e| e.to_string())?;
        typed.push(tempora::syntax::typecheck(&raw, lexicon).map_err(|e| e.to_string())?);
    }
    let hypothesis = typed.pop().expect("clap enforces at least one tree");
    tempora::semantics::interpret_problem(&typed, &hypothesis, now, lexicon)
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check { trees, now, budget } => {
            let now = parse_now(&now)?;
            let problem = load_problem(&trees, now)?;
            let lexicon = Lexicon::builtin();
            let axioms = tempora::axioms::generate_axioms(&problem, lexicon);
            let verdict =
                tempora::prover::decide(&problem, &axioms, &budget.unwrap_or_default())
                    .map_err(|e| e.to_string())?;
            println!("{}", verdict.answer);
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace { trees, now, budget } => {
            let now = parse_now(&now)?;
            let problem = load_problem(&trees, now)?;
            let lexicon = Lexicon::builtin();
            let axioms = tempora::axioms::generate_axioms(&problem, lexicon);
            let verdict =
                tempora::prover::decide(&problem, &axioms, &budget.unwrap_or_default())
                    .map_err(|e| e.to_string())?;
            for step in &verdict.trace {
                println!("{step}");
            }
            println!("verdict: {}", verdict.answer);
            Ok(ExitCode::SUCCESS)
        }
        Command::DumpLf { trees, now } => {
            let now = parse_now(&now)?;
            if trees.len() == 1 {
                // Interpret the single tree as a premise so its indefinites
                // take discourse scope, then close them existentially.
                let lexicon = Lexicon::builtin();
                let text = std::fs::read_to_string(&trees[0])
                    .map_err(|e| format!("cannot read {}: {e}", trees[0].display()))?;
                let raw = tempora::syntax::read_tree(&text).map_err(|e| e.to_string())?;
                let typed =
                    tempora::syntax::typecheck(&raw, lexicon).map_err(|e| e.to_string())?;
                let trivial_hyp = typed.clone();
                let problem = tempora::semantics::interpret_problem(
                    std::slice::from_ref(&typed),
                    &trivial_hyp,
                    now,
                    lexicon,
                )
                .map_err(|e| e.to_string())?;
                println!("{}", print_formula(&sentence_form(&problem)));
            } else {
                let problem = load_problem(&trees, now)?;
                println!("{}", print_formula(&refutation_form(&problem)));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite { file, json, budget } => {
            let report =
                run_suite(&file, &budget.unwrap_or_default()).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
                );
            } else {
                print!("{}", report.render_table());
            }
            let any_supported_miss = report
                .entries
                .iter()
                .any(|e| {
                    e.status == tempora::harness::EntryStatus::Supported
                        && !e.got.matches(e.expected)
                });
            if any_supported_miss {
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}
