//! Temporal semantics and three-way textual entailment over grammatical
//! syntax trees.
//!
//! The pipeline: parenthesized tree dumps are [read](syntax::read_tree) and
//! [checked](syntax::typecheck) against a closed grammatical signature,
//! [interpreted](semantics::interpret_problem) into first-order logical forms
//! over entities and integer time points, enriched with
//! [aspectual axiom instances](axioms::generate_axioms), and
//! [decided](prover::decide) by bounded saturation with a difference-logic
//! core. The verdict is `Yes`, `No`, or `Unknown`, with a replayable proof
//! trace.
//!
//! ```
//! use tempora::{check_entailment, prover::Answer};
//!
//! let premise = r#"
//! (useCl past pPos
//!  (predVP (usePN (lexemePN "smith_PN"))
//!   (advVP (complSlash (slashV2a (lexemeV2 "write_V2"))
//!           (detCN (detQuant indefArt numSg) (useN (lexemeN "novel_N"))))
//!    (lexemeAdv "in_1991_Adv"))))"#;
//! let hypothesis = r#"
//! (useCl past pPos
//!  (predVP (usePN (lexemePN "smith_PN"))
//!   (advVP (complSlash (slashV2a (lexemeV2 "write_V2")) (usePron it_Pron))
//!    (lexemeAdv "in_1992_Adv"))))"#;
//!
//! let verdict = check_entailment(&[premise], hypothesis, None, None).unwrap();
//! assert_eq!(verdict.answer, Answer::No);
//! ```

pub mod axioms;
pub mod harness;
pub mod lexicon;
pub mod logic;
pub mod prover;
pub mod semantics;
pub mod syntax;

#[doc(hidden)]
pub mod testutil;

#[cfg(doctest)]
mod book;

use thiserror::Error;

use lexicon::{Lexicon, TimePoint};
use prover::{SaturationBudget, Verdict};

/// Any error the pipeline can surface.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Syntax(#[from] syntax::SyntaxError),
    #[error(transparent)]
    Lexicon(#[from] lexicon::LexiconError),
    #[error(transparent)]
    Semantics(#[from] semantics::SemanticsError),
    #[error(transparent)]
    Decide(#[from] prover::DecideError),
}

/// Run the whole pipeline on tree texts: read, typecheck, interpret,
/// generate axioms, decide.
pub fn check_entailment(
    premises: &[&str],
    hypothesis: &str,
    now: Option<TimePoint>,
    budget: Option<SaturationBudget>,
) -> Result<Verdict, PipelineError> {
    let problem = interpret_trees(premises, hypothesis, now)?;
    let lexicon = Lexicon::builtin();
    let instances = axioms::generate_axioms(&problem, lexicon);
    Ok(prover::decide(&problem, &instances, &budget.unwrap_or_default())?)
}

/// Read, typecheck and interpret tree texts into an
/// [`semantics::InterpretedProblem`].
pub fn interpret_trees(
    premises: &[&str],
    hypothesis: &str,
    now: Option<TimePoint>,
) -> Result<semantics::InterpretedProblem, PipelineError> {
    let lexicon = Lexicon::builtin();
    let mut premise_trees = Vec::new();
    for text in premises {
        let tree = syntax::read_tree(text)?;
        premise_trees.push(syntax::typecheck(&tree, lexicon)?);
    }
    let hyp_tree = syntax::read_tree(hypothesis)?;
    let hyp = syntax::typecheck(&hyp_tree, lexicon)?;
    Ok(semantics::interpret_problem(&premise_trees, &hyp, now, lexicon)?)
}
