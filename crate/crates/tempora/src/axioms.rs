//! Aspectual axiom schemata, instantiated per predicate and entity-argument
//! tuple occurring in a problem.
//!
//! Activities get unicity of action: two occurrences with identical entity
//! arguments denote the same interval. Statives and `PROG_` variants get
//! subsumption: truth on an interval transfers to every sub-interval.
//! Activities whose lexical entry licenses it additionally imply their
//! `PROG_` variant on the same interval, generated only when both forms
//! occur in the problem.
//!
//! Instances are generated only for predicate/argument tuples textually
//! present, which keeps the prover's search finite. Entity arguments match
//! by syntactic term identity after pronoun resolution; the repeatable
//! contrast between shared and independent indefinites rests exactly on
//! this.

use std::collections::BTreeSet;
use std::fmt;

use crate::lexicon::{AspectClass, Lexicon};
use crate::logic::{Formula, Sort, Term};
use crate::semantics::{base_lemma, verb_category, InterpretedProblem};

/// Which schema an instance comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AxiomSchema {
    Unicity,
    Subsumption,
    ProgImplication,
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomSchema::Unicity => f.write_str("unicity"),
            AxiomSchema::Subsumption => f.write_str("subsumption"),
            AxiomSchema::ProgImplication => f.write_str("prog-implication"),
        }
    }
}

/// One instantiated schema for a predicate with fixed entity arguments.
#[derive(Clone, Debug)]
pub struct AxiomInstance {
    pub schema: AxiomSchema,
    pub pred_name: String,
    pub fixed_entity_args: Vec<Term>,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Occurrence {
    name: String,
    entity_args: Vec<Term>,
    subsumable: bool,
}

/// Generate the axiom instances for a problem.
pub fn generate_axioms(problem: &InterpretedProblem, lexicon: &Lexicon) -> Vec<AxiomInstance> {
    let mut occurrences = BTreeSet::new();
    for f in &problem.premise_formulas {
        collect(f, &mut occurrences);
    }
    collect(&problem.hypothesis_formula, &mut occurrences);
    for dq in &problem.discourse_quantifiers {
        collect(&dq.restrictor, &mut occurrences);
    }

    let names_present: BTreeSet<&str> =
        occurrences.iter().map(|o| o.name.as_str()).collect();

    let mut instances = Vec::new();
    let mut seen = BTreeSet::new();
    for occ in &occurrences {
        let is_prog = occ.name.starts_with("PROG_");
        let aspect = if is_prog {
            AspectClass::Stative
        } else {
            let lemma = base_lemma(&occ.name);
            match lexicon.lookup(lemma, verb_category(lemma)) {
                Ok(entry) => entry.aspect,
                Err(_) => continue,
            }
        };
        let key = |schema: AxiomSchema| {
            (schema, occ.name.clone(), format!("{:?}", occ.entity_args))
        };
        match aspect {
            AspectClass::Activity => {
                if seen.insert(key(AxiomSchema::Unicity)) {
                    instances.push(unicity_instance(&occ.name, &occ.entity_args));
                }
                let lemma = base_lemma(&occ.name);
                let entry = lexicon
                    .lookup(lemma, verb_category(lemma))
                    .expect("activity lemma resolved above");
                let prog_name = format!("PROG_{}", occ.name);
                if entry.licenses_prog_implication
                    && names_present.contains(prog_name.as_str())
                    && seen.insert(key(AxiomSchema::ProgImplication))
                {
                    instances.push(prog_implication_instance(&occ.name, &occ.entity_args));
                }
            }
            AspectClass::Stative => {
                // Subsumption only if some occurrence of this tuple sits in
                // a region where it is allowed.
                let any_subsumable = occurrences.iter().any(|o| {
                    o.name == occ.name && o.entity_args == occ.entity_args && o.subsumable
                });
                if any_subsumable && seen.insert(key(AxiomSchema::Subsumption)) {
                    instances.push(subsumption_instance(&occ.name, &occ.entity_args));
                }
            }
        }
    }
    instances
}

fn collect(f: &Formula, out: &mut BTreeSet<Occurrence>) {
    match f {
        Formula::Forall(_, _, body) | Formula::Exists(_, _, body) | Formula::Not(body) => {
            collect(body, out)
        }
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
            collect(l, out);
            collect(r, out);
        }
        Formula::Pred { name, entity_args, subsumable, .. } => {
            out.insert(Occurrence {
                name: name.clone(),
                entity_args: entity_args.clone(),
                subsumable: *subsumable,
            });
        }
        _ => {}
    }
}

fn tvar(n: &str) -> Term {
    Term::TimeVar(n.to_string())
}

fn atom(name: &str, entity_args: &[Term], start: &str, stop: &str) -> Formula {
    Formula::Pred {
        name: name.to_string(),
        entity_args: entity_args.to_vec(),
        start: tvar(start),
        stop: tvar(stop),
        subsumable: true,
        episodic: true,
    }
}

fn forall_times(vars: &[&str], body: Formula) -> Formula {
    vars.iter().rev().fold(body, |acc, v| {
        Formula::Forall(v.to_string(), Sort::Time, Box::new(acc))
    })
}

fn unicity_instance(name: &str, args: &[Term]) -> AxiomInstance {
    let body = Formula::implies(
        atom(name, args, "t1", "t2"),
        Formula::implies(
            atom(name, args, "t3", "t4"),
            Formula::and(
                Formula::eq(tvar("t1"), tvar("t3")),
                Formula::eq(tvar("t2"), tvar("t4")),
            ),
        ),
    );
    AxiomInstance {
        schema: AxiomSchema::Unicity,
        pred_name: name.to_string(),
        fixed_entity_args: args.to_vec(),
        formula: forall_times(&["t1", "t2", "t3", "t4"], body),
    }
}

fn subsumption_instance(name: &str, args: &[Term]) -> AxiomInstance {
    let body = Formula::implies(
        Formula::le(tvar("t1"), tvar("t3")),
        Formula::implies(
            Formula::le(tvar("t3"), tvar("t4")),
            Formula::implies(
                Formula::le(tvar("t4"), tvar("t2")),
                Formula::implies(atom(name, args, "t1", "t2"), atom(name, args, "t3", "t4")),
            ),
        ),
    );
    AxiomInstance {
        schema: AxiomSchema::Subsumption,
        pred_name: name.to_string(),
        fixed_entity_args: args.to_vec(),
        formula: forall_times(&["t1", "t2", "t3", "t4"], body),
    }
}

fn prog_implication_instance(name: &str, args: &[Term]) -> AxiomInstance {
    let prog = format!("PROG_{name}");
    let body = Formula::implies(atom(name, args, "t1", "t2"), atom(&prog, args, "t1", "t2"));
    AxiomInstance {
        schema: AxiomSchema::ProgImplication,
        pred_name: name.to_string(),
        fixed_entity_args: args.to_vec(),
        formula: forall_times(&["t1", "t2"], body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Lexicon;
    use crate::semantics::interpret_problem;
    use crate::syntax::{read_tree, typecheck, TypedTree};

    fn typed(text: &str) -> TypedTree {
        typecheck(&read_tree(text).unwrap(), Lexicon::builtin()).unwrap()
    }

    fn problem(premises: &[&str], hypothesis: &str) -> InterpretedProblem {
        let ps: Vec<TypedTree> = premises.iter().map(|t| typed(t)).collect();
        let h = typed(hypothesis);
        interpret_problem(&ps, &h, None, Lexicon::builtin()).unwrap()
    }

    const WRITE_A_NOVEL_1991: &str = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "smith_PN"))
   (advVP (complSlash (slashV2a (lexemeV2 "write_V2"))
     (detCN (detQuant indefArt numSg) (useN (lexemeN "novel_N"))))
    (lexemeAdv "in_1991_Adv"))))"#;

    const WRITE_IT_1992: &str = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "smith_PN"))
   (advVP (complSlash (slashV2a (lexemeV2 "write_V2")) (usePron it_Pron))
    (lexemeAdv "in_1992_Adv"))))"#;

    const WRITE_A_NOVEL_1992: &str = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "smith_PN"))
   (advVP (complSlash (slashV2a (lexemeV2 "write_V2"))
     (detCN (detQuant indefArt numSg) (useN (lexemeN "novel_N"))))
    (lexemeAdv "in_1992_Adv"))))"#;

    #[test]
    fn shared_object_yields_one_unicity_instance() {
        let p = problem(&[WRITE_A_NOVEL_1991], WRITE_IT_1992);
        let instances = generate_axioms(&p, Lexicon::builtin());
        let unicity: Vec<&AxiomInstance> = instances
            .iter()
            .filter(|i| i.schema == AxiomSchema::Unicity && i.pred_name == "write_V2")
            .collect();
        assert_eq!(unicity.len(), 1);
        assert_eq!(unicity[0].fixed_entity_args.len(), 2);
    }

    #[test]
    fn independent_indefinites_yield_separate_instances() {
        let p = problem(&[WRITE_A_NOVEL_1991], WRITE_A_NOVEL_1992);
        let instances = generate_axioms(&p, Lexicon::builtin());
        let unicity: Vec<&AxiomInstance> = instances
            .iter()
            .filter(|i| i.schema == AxiomSchema::Unicity && i.pred_name == "write_V2")
            .collect();
        // Two tuples, one instance each; none links the two occurrences.
        assert_eq!(unicity.len(), 2);
        assert_ne!(unicity[0].fixed_entity_args, unicity[1].fixed_entity_args);
    }

    #[test]
    fn statives_get_subsumption_not_unicity() {
        let be_in = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "smith_PN"))
   (advVP (complSlash (slashV2a (lexemeV2 "be_in_V2")) (usePN (lexemePN "paris_PN")))
    (lexemeAdv "on_may_7_1995_Adv"))))"#;
        let p = problem(&[be_in], be_in);
        let instances = generate_axioms(&p, Lexicon::builtin());
        assert!(instances
            .iter()
            .any(|i| i.schema == AxiomSchema::Subsumption && i.pred_name == "be_in_V2"));
        assert!(!instances
            .iter()
            .any(|i| i.schema == AxiomSchema::Unicity && i.pred_name == "be_in_V2"));
    }

    #[test]
    fn schema_guards_hold_on_every_instance() {
        let p = problem(&[WRITE_A_NOVEL_1991], WRITE_IT_1992);
        let lexicon = Lexicon::builtin();
        for inst in generate_axioms(&p, lexicon) {
            let is_prog = inst.pred_name.starts_with("PROG_");
            let lemma = crate::semantics::base_lemma(&inst.pred_name);
            let aspect = if is_prog {
                AspectClass::Stative
            } else {
                lexicon.lookup(lemma, crate::semantics::verb_category(lemma)).unwrap().aspect
            };
            match inst.schema {
                AxiomSchema::Unicity => assert_eq!(aspect, AspectClass::Activity),
                AxiomSchema::Subsumption => assert_eq!(aspect, AspectClass::Stative),
                AxiomSchema::ProgImplication => assert_eq!(aspect, AspectClass::Activity),
            }
        }
    }

    #[test]
    fn prog_implication_needs_both_forms_and_a_license() {
        // write licenses the implication; both forms occur.
        let p = problem(
            &[r#"(useCl past pPos (predVP (usePN (lexemePN "john_PN"))
                 (complSlash (slashV2a (lexemeV2 "write_V2"))
                   (detCN (detQuant indefArt numSg) (useN (lexemeN "book_N"))))))"#],
            r#"(useCl pastProgressive pPos (predVP (usePN (lexemePN "john_PN"))
                 (complSlash (slashV2a (lexemeV2 "write_V2"))
                   (detCN (detQuant indefArt numSg) (useN (lexemeN "book_N"))))))"#,
        );
        let instances = generate_axioms(&p, Lexicon::builtin());
        assert!(instances.iter().any(|i| i.schema == AxiomSchema::ProgImplication));

        // find has a progressive variant but withholds the implication.
        let p = problem(
            &[r#"(useCl past pPos (predVP (usePN (lexemePN "john_PN"))
                 (complSlash (slashV2a (lexemeV2 "find_V2"))
                   (detCN (detQuant defArt numPl) (useN (lexemeN "key_N"))))))"#],
            r#"(useCl pastProgressive pPos (predVP (usePN (lexemePN "john_PN"))
                 (complSlash (slashV2a (lexemeV2 "find_V2"))
                   (detCN (detQuant defArt numPl) (useN (lexemeN "key_N"))))))"#,
        );
        let instances = generate_axioms(&p, Lexicon::builtin());
        assert!(!instances.iter().any(|i| i.schema == AxiomSchema::ProgImplication));

        // write again, but no progressive form in the problem: no instance.
        let p = problem(&[WRITE_A_NOVEL_1991], WRITE_IT_1992);
        let instances = generate_axioms(&p, Lexicon::builtin());
        assert!(!instances.iter().any(|i| i.schema == AxiomSchema::ProgImplication));
    }

    #[test]
    fn flagged_occurrences_suppress_subsumption_instances() {
        // "lived in Birmingham for exactly a year": the only stative
        // occurrence sits in a no-subsumption region.
        let p = problem(
            &[r#"(useCl past pPos (predVP (usePN (lexemePN "smith_PN"))
                 (advVP (complSlash (slashV2a (lexemeV2 "live_in_V2"))
                    (usePN (lexemePN "birmingham_PN")))
                  (lexemeAdv "for_exactly_a_year_Adv"))))"#],
            r#"(useCl past pPos (predVP (usePN (lexemePN "john_PN")) (useV (lexemeV "walk_V"))))"#,
        );
        let instances = generate_axioms(&p, Lexicon::builtin());
        assert!(!instances
            .iter()
            .any(|i| i.schema == AxiomSchema::Subsumption && i.pred_name == "live_in_V2"));
    }
}
