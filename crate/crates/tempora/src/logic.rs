//! The first-order logical form: entities, integer time points, and the
//! connectives the prover understands.
//!
//! Time is discrete and integer-valued. Every temporal predicate carries
//! exactly two time arguments, the start and stop of its timespan; a span
//! `[t0, t1]` is well-formed when `t0 <= t1`. There are no function symbols
//! beyond constants, so the term universe stays finite after Skolemization
//! with zero-arity Skolems.
//!
//! Comparison atoms carry an integer offset (`a <= b + k`) because duration
//! adverbs pin span lengths; plain orderings use offset 0 and print without
//! it.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::lexicon::TimePoint;

pub mod eval;
pub mod text;

/// Sort of a term: entities and time points never mix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Entity,
    Time,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Entity => f.write_str("object"),
            Sort::Time => f.write_str("Z"),
        }
    }
}

/// A term. `Var` is entity-sorted, `TimeVar` time-sorted; `Now` is the
/// distinguished time constant for the utterance time.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    EntityConst(String),
    TimeVar(String),
    TimeConst(TimePoint),
    Now,
    Skolem { name: String, sort: Sort },
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(_) | Term::EntityConst(_) => Sort::Entity,
            Term::TimeVar(_) | Term::TimeConst(_) | Term::Now => Sort::Time,
            Term::Skolem { sort, .. } => *sort,
        }
    }

    /// The variable name, if this is a variable of either sort.
    pub fn var_name(&self) -> Option<&str> {
        match self {
            Term::Var(n) | Term::TimeVar(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.var_name().is_none()
    }

    fn rename_var(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(n) if n == from => Term::Var(to.to_string()),
            Term::TimeVar(n) if n == from => Term::TimeVar(to.to_string()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n) | Term::TimeVar(n) => f.write_str(n),
            Term::EntityConst(n) => f.write_str(n),
            Term::TimeConst(p) => {
                let (y, m, d) = p.to_ymd();
                write!(f, "Date_{y:04}{m:02}{d:02}")
            }
            Term::Now => f.write_str("now"),
            Term::Skolem { name, .. } => f.write_str(name),
        }
    }
}

/// A timespan: the pair of time terms a temporal predicate is applied at.
/// Wherever an interval is introduced, the constraint `start <= stop` is
/// emitted alongside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub start: Term,
    pub stop: Term,
}

impl Interval {
    pub fn new(start: Term, stop: Term) -> Interval {
        Interval { start, stop }
    }
}

/// A formula. `Pred` is a temporal predicate (exactly two time arguments);
/// `AtemporalPred` covers nouns, which carry no timespan. Comparisons read
/// `lhs OP rhs + offset` and relate time-sorted terms only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Forall(String, Sort, Box<Formula>),
    Exists(String, Sort, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Bottom,
    Pred {
        name: String,
        entity_args: Vec<Term>,
        start: Term,
        stop: Term,
        /// Cleared inside duration-pinning adverb scopes; the subsumption
        /// schema never fires on such occurrences.
        subsumable: bool,
        /// Cleared inside generic (universally quantified) spans: law-like
        /// statements are not event reports, so unicity never pairs them.
        episodic: bool,
    },
    AtemporalPred { name: String, args: Vec<Term> },
    Le(Term, Term, i64),
    Lt(Term, Term, i64),
    Eq(Term, Term, i64),
}

impl Formula {
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn forall(v: &str, sort: Sort, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), sort, Box::new(body))
    }

    pub fn exists(v: &str, sort: Sort, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), sort, Box::new(body))
    }

    /// Right-nested conjunction of a non-empty list.
    pub fn and_all(mut fs: Vec<Formula>) -> Formula {
        let last = fs.pop().expect("and_all of empty list");
        fs.into_iter().rev().fold(last, |acc, f| Formula::and(f, acc))
    }

    pub fn pred(name: &str, entity_args: Vec<Term>, interval: &Interval) -> Formula {
        Formula::Pred {
            name: name.to_string(),
            entity_args,
            start: interval.start.clone(),
            stop: interval.stop.clone(),
            subsumable: true,
            episodic: true,
        }
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Le(a, b, 0)
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Lt(a, b, 0)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b, 0)
    }

    /// Free variable names (entity and time sorts share a namespace here;
    /// the semantics never reuses a name across sorts).
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            if let Some(n) = t.var_name() {
                if !bound.iter().any(|b| b == n) {
                    out.insert(n.to_string());
                }
            }
        };
        match self {
            Formula::Forall(v, _, body) | Formula::Exists(v, _, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Not(b) => b.collect_free(bound, out),
            Formula::Bottom => {}
            Formula::Pred { entity_args, start, stop, .. } => {
                for t in entity_args {
                    term(t, bound, out);
                }
                term(start, bound, out);
                term(stop, bound, out);
            }
            Formula::AtemporalPred { args, .. } => {
                for t in args {
                    term(t, bound, out);
                }
            }
            Formula::Le(a, b, _) | Formula::Lt(a, b, _) | Formula::Eq(a, b, _) => {
                term(a, bound, out);
                term(b, bound, out);
            }
        }
    }

    fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::Forall(v, s, body) => {
                Formula::Forall(v.clone(), *s, Box::new(body.map_terms(f)))
            }
            Formula::Exists(v, s, body) => {
                Formula::Exists(v.clone(), *s, Box::new(body.map_terms(f)))
            }
            Formula::And(l, r) => Formula::and(l.map_terms(f), r.map_terms(f)),
            Formula::Or(l, r) => Formula::or(l.map_terms(f), r.map_terms(f)),
            Formula::Implies(l, r) => Formula::implies(l.map_terms(f), r.map_terms(f)),
            Formula::Not(b) => Formula::not(b.map_terms(f)),
            Formula::Bottom => Formula::Bottom,
            Formula::Pred { name, entity_args, start, stop, subsumable, episodic } => {
                Formula::Pred {
                    name: name.clone(),
                    entity_args: entity_args.iter().map(&mut *f).collect(),
                    start: f(start),
                    stop: f(stop),
                    subsumable: *subsumable,
                    episodic: *episodic,
                }
            }
            Formula::AtemporalPred { name, args } => Formula::AtemporalPred {
                name: name.clone(),
                args: args.iter().map(&mut *f).collect(),
            },
            Formula::Le(a, b, k) => Formula::Le(f(a), f(b), *k),
            Formula::Lt(a, b, k) => Formula::Lt(f(a), f(b), *k),
            Formula::Eq(a, b, k) => Formula::Eq(f(a), f(b), *k),
        }
    }
}

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("cannot substitute a {term_sort} term for {var} (a {var_sort} variable)")]
    SortMismatch { var: String, var_sort: Sort, term_sort: Sort },
}

/// Capture-avoiding substitution of `t` for the free variable `v`.
///
/// Free occurrences of `v` with the other sort are a [`LogicError::SortMismatch`];
/// binders that would capture variables of `t` are renamed first, so the
/// result is alpha-equivalent to the naive textbook substitution.
pub fn substitute(f: &Formula, v: &str, t: &Term) -> Result<Formula, LogicError> {
    if let Some(bad) = find_free_sort_clash(f, v, t.sort()) {
        return Err(LogicError::SortMismatch {
            var: v.to_string(),
            var_sort: bad,
            term_sort: t.sort(),
        });
    }
    let mut counter = 0usize;
    Ok(subst_inner(f, v, t, &mut counter))
}

fn find_free_sort_clash(f: &Formula, v: &str, want: Sort) -> Option<Sort> {
    let mut clash = None;
    let mut walk = |t: &Term, bound: &Vec<String>, clash: &mut Option<Sort>| {
        if t.var_name() == Some(v) && !bound.iter().any(|b| b == v) && t.sort() != want {
            *clash = Some(t.sort());
        }
    };
    fn go(
        f: &Formula,
        v: &str,
        bound: &mut Vec<String>,
        walk: &mut impl FnMut(&Term, &Vec<String>, &mut Option<Sort>),
        clash: &mut Option<Sort>,
    ) {
        match f {
            Formula::Forall(b, _, body) | Formula::Exists(b, _, body) => {
                bound.push(b.clone());
                go(body, v, bound, walk, clash);
                bound.pop();
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                go(l, v, bound, walk, clash);
                go(r, v, bound, walk, clash);
            }
            Formula::Not(b) => go(b, v, bound, walk, clash),
            Formula::Bottom => {}
            Formula::Pred { entity_args, start, stop, .. } => {
                for t in entity_args {
                    walk(t, bound, clash);
                }
                walk(start, bound, clash);
                walk(stop, bound, clash);
            }
            Formula::AtemporalPred { args, .. } => {
                for t in args {
                    walk(t, bound, clash);
                }
            }
            Formula::Le(a, b, _) | Formula::Lt(a, b, _) | Formula::Eq(a, b, _) => {
                walk(a, bound, clash);
                walk(b, bound, clash);
            }
        }
    }
    go(f, v, &mut Vec::new(), &mut walk, &mut clash);
    clash
}

fn subst_inner(f: &Formula, v: &str, t: &Term, counter: &mut usize) -> Formula {
    match f {
        Formula::Forall(b, s, body) | Formula::Exists(b, s, body) => {
            let rebuild = |b: String, s: Sort, body: Formula| match f {
                Formula::Forall(..) => Formula::Forall(b, s, Box::new(body)),
                _ => Formula::Exists(b, s, Box::new(body)),
            };
            if b == v {
                // Bound occurrence shadows; nothing to do below.
                return f.clone();
            }
            if t.var_name() == Some(b.as_str()) {
                // The binder would capture the substituted term: rename it.
                let fresh = loop {
                    let candidate = format!("{b}'{counter}");
                    *counter += 1;
                    if body.free_vars().iter().all(|n| n != &candidate) && candidate != v {
                        break candidate;
                    }
                };
                let renamed = body.map_terms(&mut |term| term.rename_var(b, &fresh));
                return rebuild(fresh, *s, subst_inner(&renamed, v, t, counter));
            }
            rebuild(b.clone(), *s, subst_inner(body, v, t, counter))
        }
        Formula::And(l, r) => {
            Formula::and(subst_inner(l, v, t, counter), subst_inner(r, v, t, counter))
        }
        Formula::Or(l, r) => {
            Formula::or(subst_inner(l, v, t, counter), subst_inner(r, v, t, counter))
        }
        Formula::Implies(l, r) => {
            Formula::implies(subst_inner(l, v, t, counter), subst_inner(r, v, t, counter))
        }
        Formula::Not(b) => Formula::not(subst_inner(b, v, t, counter)),
        leaf => leaf.map_terms(&mut |term| {
            if term.var_name() == Some(v) {
                t.clone()
            } else {
                term.clone()
            }
        }),
    }
}

/// Replace free variables according to the map, respecting binder
/// shadowing. The replacement terms are constants or Skolems, so no capture
/// can occur.
pub fn instantiate_free(f: &Formula, map: &std::collections::BTreeMap<String, Term>) -> Formula {
    fn go(
        f: &Formula,
        map: &std::collections::BTreeMap<String, Term>,
        shadowed: &mut Vec<String>,
    ) -> Formula {
        match f {
            Formula::Forall(v, s, body) | Formula::Exists(v, s, body) => {
                shadowed.push(v.clone());
                let inner = go(body, map, shadowed);
                shadowed.pop();
                match f {
                    Formula::Forall(..) => Formula::Forall(v.clone(), *s, Box::new(inner)),
                    _ => Formula::Exists(v.clone(), *s, Box::new(inner)),
                }
            }
            Formula::And(l, r) => Formula::and(go(l, map, shadowed), go(r, map, shadowed)),
            Formula::Or(l, r) => Formula::or(go(l, map, shadowed), go(r, map, shadowed)),
            Formula::Implies(l, r) => {
                Formula::implies(go(l, map, shadowed), go(r, map, shadowed))
            }
            Formula::Not(b) => Formula::not(go(b, map, shadowed)),
            leaf => {
                let mut replace = |t: &Term| {
                    if let Some(n) = t.var_name() {
                        if !shadowed.iter().any(|s| s == n) {
                            if let Some(r) = map.get(n) {
                                return r.clone();
                            }
                        }
                    }
                    t.clone()
                };
                leaf.map_terms(&mut replace)
            }
        }
    }
    go(f, map, &mut Vec::new())
}

/// Negation normal form with unique bound names.
///
/// `Implies` is eliminated, negation pushed to atoms, `Bottom` propagated
/// through connectives. `Not(Bottom)` serves as the truth constant when
/// propagation produces one. Satisfiability and entailment are preserved
/// (checked in tests by brute-force model evaluation over tiny domains).
pub fn normalize(f: &Formula) -> Formula {
    let mut counter = 0usize;
    let renamed = uniquify(f, &mut Vec::new(), &mut counter);
    nnf(&renamed, false)
}

fn uniquify(f: &Formula, scope: &mut Vec<(String, String)>, counter: &mut usize) -> Formula {
    match f {
        Formula::Forall(v, s, body) | Formula::Exists(v, s, body) => {
            let fresh = format!("{}{}", binder_stem(*s), counter);
            *counter += 1;
            scope.push((v.clone(), fresh.clone()));
            let inner = uniquify(body, scope, counter);
            scope.pop();
            match f {
                Formula::Forall(..) => Formula::Forall(fresh, *s, Box::new(inner)),
                _ => Formula::Exists(fresh, *s, Box::new(inner)),
            }
        }
        Formula::And(l, r) => {
            Formula::and(uniquify(l, scope, counter), uniquify(r, scope, counter))
        }
        Formula::Or(l, r) => Formula::or(uniquify(l, scope, counter), uniquify(r, scope, counter)),
        Formula::Implies(l, r) => {
            Formula::implies(uniquify(l, scope, counter), uniquify(r, scope, counter))
        }
        Formula::Not(b) => Formula::not(uniquify(b, scope, counter)),
        leaf => leaf.map_terms(&mut |t| {
            if let Some(n) = t.var_name() {
                // Innermost binding wins.
                if let Some((_, fresh)) = scope.iter().rev().find(|(orig, _)| orig == n) {
                    return match t.sort() {
                        Sort::Entity => Term::Var(fresh.clone()),
                        Sort::Time => Term::TimeVar(fresh.clone()),
                    };
                }
            }
            t.clone()
        }),
    }
}

fn binder_stem(sort: Sort) -> &'static str {
    match sort {
        Sort::Entity => "x",
        Sort::Time => "t",
    }
}

fn is_top(f: &Formula) -> bool {
    matches!(f, Formula::Not(b) if **b == Formula::Bottom)
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    match f {
        Formula::Forall(v, s, body) => {
            let inner = nnf(body, negate);
            if negate {
                Formula::Exists(v.clone(), *s, Box::new(inner))
            } else {
                Formula::Forall(v.clone(), *s, Box::new(inner))
            }
        }
        Formula::Exists(v, s, body) => {
            let inner = nnf(body, negate);
            if negate {
                Formula::Forall(v.clone(), *s, Box::new(inner))
            } else {
                Formula::Exists(v.clone(), *s, Box::new(inner))
            }
        }
        Formula::And(l, r) => {
            let (l, r) = (nnf(l, negate), nnf(r, negate));
            if negate {
                smart_or(l, r)
            } else {
                smart_and(l, r)
            }
        }
        Formula::Or(l, r) => {
            let (l, r) = (nnf(l, negate), nnf(r, negate));
            if negate {
                smart_and(l, r)
            } else {
                smart_or(l, r)
            }
        }
        Formula::Implies(l, r) => {
            // A -> B is ~A \/ B.
            let (nl, nr) = (nnf(l, !negate), nnf(r, negate));
            if negate {
                smart_and(nl, nr)
            } else {
                smart_or(nl, nr)
            }
        }
        Formula::Not(b) => nnf(b, !negate),
        Formula::Bottom => {
            if negate {
                Formula::not(Formula::Bottom)
            } else {
                Formula::Bottom
            }
        }
        atom => {
            if negate {
                Formula::not(atom.clone())
            } else {
                atom.clone()
            }
        }
    }
}

fn smart_and(l: Formula, r: Formula) -> Formula {
    if l == Formula::Bottom || r == Formula::Bottom {
        return Formula::Bottom;
    }
    if is_top(&l) {
        return r;
    }
    if is_top(&r) {
        return l;
    }
    Formula::and(l, r)
}

fn smart_or(l: Formula, r: Formula) -> Formula {
    if is_top(&l) || is_top(&r) {
        return Formula::not(Formula::Bottom);
    }
    if l == Formula::Bottom {
        return r;
    }
    if r == Formula::Bottom {
        return l;
    }
    Formula::or(l, r)
}

/// Rename bound variables to a canonical scheme (`_v0`, `_v1`, ... in
/// traversal order). Two formulas are alpha-equivalent exactly when their
/// normal forms are equal.
pub fn alpha_normalize(f: &Formula) -> Formula {
    let mut counter = 0usize;
    alpha_inner(f, &mut Vec::new(), &mut counter)
}

fn alpha_inner(f: &Formula, scope: &mut Vec<(String, String)>, counter: &mut usize) -> Formula {
    match f {
        Formula::Forall(v, s, body) | Formula::Exists(v, s, body) => {
            let fresh = format!("_v{counter}");
            *counter += 1;
            scope.push((v.clone(), fresh.clone()));
            let inner = alpha_inner(body, scope, counter);
            scope.pop();
            match f {
                Formula::Forall(..) => Formula::Forall(fresh, *s, Box::new(inner)),
                _ => Formula::Exists(fresh, *s, Box::new(inner)),
            }
        }
        Formula::And(l, r) => {
            Formula::and(alpha_inner(l, scope, counter), alpha_inner(r, scope, counter))
        }
        Formula::Or(l, r) => {
            Formula::or(alpha_inner(l, scope, counter), alpha_inner(r, scope, counter))
        }
        Formula::Implies(l, r) => {
            Formula::implies(alpha_inner(l, scope, counter), alpha_inner(r, scope, counter))
        }
        Formula::Not(b) => Formula::not(alpha_inner(b, scope, counter)),
        leaf => leaf.map_terms(&mut |t| {
            if let Some(n) = t.var_name() {
                if let Some((_, fresh)) = scope.iter().rev().find(|(orig, _)| orig == n) {
                    return match t.sort() {
                        Sort::Entity => Term::Var(fresh.clone()),
                        Sort::Time => Term::TimeVar(fresh.clone()),
                    };
                }
            }
            t.clone()
        }),
    }
}

/// Alpha-equivalence.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_normalize(a) == alpha_normalize(b)
}

/// Render a formula in the unfolded dump style: `forall`/`exists` binder
/// groups, `/\`, `->`, `<=`, bare predicate application, `False` for bottom.
/// The output reparses with [`text::parse_formula`]; golden tests compare
/// token streams after [`alpha_normalize`].
pub fn print_formula(f: &Formula) -> String {
    text::print(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval::{truth_of, Interp};

    fn smith() -> Term {
        Term::EntityConst("SMITH".into())
    }

    #[test]
    fn substitute_replaces_free_occurrences() {
        let f = Formula::Pred {
            name: "write_V2".into(),
            entity_args: vec![Term::Var("x".into()), smith()],
            start: Term::TimeVar("a".into()),
            stop: Term::TimeVar("b".into()),
            subsumable: true,
            episodic: true,
        };
        let novel = Term::EntityConst("novel1".into());
        let out = substitute(&f, "x", &novel).unwrap();
        assert_eq!(
            out,
            Formula::Pred {
                name: "write_V2".into(),
                entity_args: vec![novel, smith()],
                start: Term::TimeVar("a".into()),
                stop: Term::TimeVar("b".into()),
                subsumable: true,
                episodic: true,
            }
        );
    }

    #[test]
    fn substitute_respects_shadowing() {
        let f = Formula::exists(
            "x",
            Sort::Entity,
            Formula::AtemporalPred { name: "P".into(), args: vec![Term::Var("x".into())] },
        );
        let out = substitute(&f, "x", &Term::EntityConst("c".into())).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn substitute_avoids_capture() {
        // [y := x] in (exists x. P(x, y)) must rename the binder.
        let f = Formula::exists(
            "x",
            Sort::Entity,
            Formula::AtemporalPred {
                name: "P".into(),
                args: vec![Term::Var("x".into()), Term::Var("y".into())],
            },
        );
        let out = substitute(&f, "y", &Term::Var("x".into())).unwrap();
        let expected = Formula::exists(
            "z",
            Sort::Entity,
            Formula::AtemporalPred {
                name: "P".into(),
                args: vec![Term::Var("z".into()), Term::Var("x".into())],
            },
        );
        assert!(alpha_eq(&out, &expected), "got {}", print_formula(&out));
        // Brute-force alpha check: the binder no longer captures.
        assert!(!alpha_eq(
            &out,
            &Formula::exists(
                "z",
                Sort::Entity,
                Formula::AtemporalPred {
                    name: "P".into(),
                    args: vec![Term::Var("z".into()), Term::Var("z".into())],
                },
            )
        ));
    }

    #[test]
    fn substitute_rejects_sort_clashes() {
        let f = Formula::AtemporalPred { name: "P".into(), args: vec![Term::Var("x".into())] };
        let err = substitute(&f, "x", &Term::Now).unwrap_err();
        assert!(matches!(err, LogicError::SortMismatch { .. }));
    }

    #[test]
    fn normalize_pushes_negation_through_quantifiers() {
        let f = Formula::not(Formula::exists(
            "t",
            Sort::Time,
            Formula::AtemporalPred { name: "P".into(), args: vec![] },
        ));
        let out = normalize(&f);
        let expected = Formula::forall(
            "t0",
            Sort::Time,
            Formula::not(Formula::AtemporalPred { name: "P".into(), args: vec![] }),
        );
        assert!(alpha_eq(&out, &expected), "got {}", print_formula(&out));
    }

    #[test]
    fn normalize_turns_implies_bottom_into_negation() {
        let a = Formula::AtemporalPred { name: "A".into(), args: vec![] };
        let f = Formula::implies(a.clone(), Formula::Bottom);
        assert_eq!(normalize(&f), Formula::not(a));
    }

    #[test]
    fn normalize_propagates_bottom() {
        let a = Formula::AtemporalPred { name: "A".into(), args: vec![] };
        assert_eq!(normalize(&Formula::and(Formula::Bottom, a.clone())), Formula::Bottom);
        assert_eq!(normalize(&Formula::or(Formula::Bottom, a.clone())), a);
    }

    #[test]
    fn normalize_preserves_truth_on_random_formulas() {
        // Random small formulas and interpretations: 2 entities, times 0..=5.
        let mut rng = crate::testutil::XorShift::new(0x1157_2001);
        for case in 0..300 {
            let f = crate::testutil::random_formula(&mut rng, 3);
            let interp = Interp::random(&mut rng);
            let before = truth_of(&f, &interp);
            let after = truth_of(&normalize(&f), &interp);
            assert_eq!(before, after, "case {case}: {}", print_formula(&f));
        }
    }

    #[test]
    fn printer_basics() {
        assert_eq!(print_formula(&Formula::Bottom), "False");
        let pred = Formula::Pred {
            name: "write_V2".into(),
            entity_args: vec![Term::Var("x".into()), smith()],
            start: Term::TimeVar("f".into()),
            stop: Term::TimeVar("g".into()),
            subsumable: true,
            episodic: true,
        };
        assert_eq!(print_formula(&pred), "write_V2 x SMITH f g");
    }

    #[test]
    fn printer_output_reparses() {
        let f = Formula::forall(
            "x",
            Sort::Entity,
            Formula::implies(
                Formula::AtemporalPred { name: "novel_N".into(), args: vec![Term::Var("x".into())] },
                Formula::exists(
                    "b",
                    Sort::Time,
                    Formula::exists(
                        "c",
                        Sort::Time,
                        Formula::and_all(vec![
                            Formula::le(
                                Term::TimeConst(TimePoint::from_ymd(1991, 1, 1).unwrap()),
                                Term::TimeVar("b".into()),
                            ),
                            Formula::le(Term::TimeVar("b".into()), Term::TimeVar("c".into())),
                            Formula::Pred {
                                name: "write_V2".into(),
                                entity_args: vec![Term::Var("x".into()), smith()],
                                start: Term::TimeVar("b".into()),
                                stop: Term::TimeVar("c".into()),
                                subsumable: true,
                                episodic: true,
                            },
                        ]),
                    ),
                ),
            ),
        );
        let printed = print_formula(&f);
        let parsed = text::parse_formula(&printed).unwrap();
        assert!(alpha_eq(&parsed, &f), "printed: {printed}");
    }
}


#[cfg(test)]
mod worked_example_tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::lexicon::{Lexicon, TimePoint};
    use crate::logic::eval::{truth_of, Interp};
    use crate::semantics::{interpret_problem, refutation_form};
    use crate::syntax::{read_tree, typecheck};
    use crate::testutil::XorShift;

    /// Map the date constants of a formula onto small integers, preserving
    /// their order, so tiny-domain evaluation can reach them.
    fn scale_dates(f: &Formula) -> Formula {
        let mut dates: BTreeSet<TimePoint> = BTreeSet::new();
        collect_dates(f, &mut dates);
        let table: BTreeMap<TimePoint, i64> =
            dates.into_iter().zip(0..).map(|(d, i)| (d, i)).collect();
        f.map_terms(&mut |t| match t {
            Term::TimeConst(p) => Term::TimeConst(TimePoint::new(table[p])),
            other => other.clone(),
        })
    }

    fn collect_dates(f: &Formula, out: &mut BTreeSet<TimePoint>) {
        let mut term = |t: &Term, out: &mut BTreeSet<TimePoint>| {
            if let Term::TimeConst(p) = t {
                out.insert(*p);
            }
        };
        match f {
            Formula::Forall(_, _, b) | Formula::Exists(_, _, b) | Formula::Not(b) => {
                collect_dates(b, out)
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                collect_dates(l, out);
                collect_dates(r, out);
            }
            Formula::Pred { entity_args, start, stop, .. } => {
                for t in entity_args {
                    term(t, out);
                }
                term(start, out);
                term(stop, out);
            }
            Formula::AtemporalPred { args, .. } => {
                for t in args {
                    term(t, out);
                }
            }
            Formula::Le(a, b, _) | Formula::Lt(a, b, _) | Formula::Eq(a, b, _) => {
                term(a, out);
                term(b, out);
            }
            Formula::Bottom => {}
        }
    }

    fn random_interp(rng: &mut XorShift) -> Interp {
        // write_V2 takes two entity and two time arguments; novel_N one
        // entity argument; SMITH is an entity constant.
        let mut preds = BTreeMap::new();
        let mut write = BTreeSet::new();
        for e0 in 0..2 {
            for e1 in 0..2 {
                for t0 in 0..=5 {
                    for t1 in 0..=5 {
                        if rng.below(2) == 0 {
                            write.insert(vec![e0, e1, t0, t1]);
                        }
                    }
                }
            }
        }
        preds.insert("write_V2".into(), write);
        let mut apreds = BTreeMap::new();
        let mut novel = BTreeSet::new();
        for e in 0..2 {
            if rng.below(2) == 0 {
                novel.insert(vec![e]);
            }
        }
        apreds.insert("novel_N".into(), novel);
        Interp {
            n_entities: 2,
            time_lo: 0,
            time_hi: 5,
            now: (rng.next_u64() % 6) as i64,
            entity_consts: BTreeMap::from([("SMITH".into(), (rng.next_u64() % 2) as i64)]),
            time_consts: BTreeMap::new(),
            preds,
            apreds,
        }
    }

    #[test]
    fn worked_example_normalization_preserves_truth_over_tiny_domains() {
        let lexicon = Lexicon::builtin();
        let p1 = typecheck(
            &read_tree(
                r#"(useCl past pPos (predVP (usePN (lexemePN "smith_PN"))
                    (advVP (complSlash (slashV2a (lexemeV2 "write_V2"))
                       (detCN (detQuant indefArt numSg) (useN (lexemeN "novel_N"))))
                     (lexemeAdv "in_1991_Adv"))))"#,
            )
            .unwrap(),
            lexicon,
        )
        .unwrap();
        let h = typecheck(
            &read_tree(
                r#"(useCl past pPos (predVP (usePN (lexemePN "smith_PN"))
                    (advVP (complSlash (slashV2a (lexemeV2 "write_V2")) (usePron it_Pron))
                     (lexemeAdv "in_1992_Adv"))))"#,
            )
            .unwrap(),
            lexicon,
        )
        .unwrap();
        let problem = interpret_problem(&[p1], &h, None, lexicon).unwrap();
        let scaled = scale_dates(&refutation_form(&problem));
        let nnf = normalize(&scaled);
        let mut rng = XorShift::new(0x279);
        let mut sat_before = false;
        let mut sat_after = false;
        for _ in 0..200 {
            let interp = random_interp(&mut rng);
            let before = truth_of(&scaled, &interp);
            let after = truth_of(&nnf, &interp);
            assert_eq!(before, after, "normalization changed the truth value");
            sat_before |= before;
            sat_after |= after;
        }
        // The sampled space witnesses satisfiability on both sides.
        assert_eq!(sat_before, sat_after);
        assert!(sat_before, "the refutation form is satisfiable in some tiny model");
    }
}
