//! Three-way entailment by bounded saturation over ground facts plus axiom
//! instances, with the difference-logic core deciding the arithmetic.
//!
//! A problem is decided by two refutation attempts. The YES attempt assumes
//! the premises (discourse quantifiers as Skolem constants) together with
//! the negated hypothesis; the NO attempt assumes premises and hypothesis
//! together, the discourse quantifiers in refutation polarity (arbitrary
//! fresh constants, which proves the universally quantified reading). A
//! refuted YES attempt answers Yes, a refuted NO attempt answers No,
//! otherwise Unknown; both refuting at once reports an inconsistent
//! encoding.
//!
//! Saturation is pattern-triggered: universal clauses instantiate against
//! ground atoms of opposite polarity (joined across literals), with a small
//! residual enumeration over ground time terms. Ground disjunctions are
//! weakened by dropping disjuncts that close immediately, unit-propagated,
//! and only split as a last resort within budget. Equalities derived by
//! unicity merge time terms for clash detection and feed the
//! difference-logic solver directly.

pub mod dl;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::axioms::{AxiomInstance, AxiomSchema};
use crate::logic::{instantiate_free, normalize, print_formula, Formula, Sort, Term};
use crate::semantics::InterpretedProblem;
use dl::{la_sat, validate_certificate, BoundKind, DiffConstraint, DlError, SatResult};

/// The three-way answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Yes => f.write_str("Yes"),
            Answer::No => f.write_str("No"),
            Answer::Unknown => f.write_str("Unknown"),
        }
    }
}

impl FromStr for Answer {
    type Err = String;

    fn from_str(s: &str) -> Result<Answer, String> {
        match s.to_ascii_lowercase().as_str() {
            "yes" => Ok(Answer::Yes),
            "no" => Ok(Answer::No),
            "unknown" | "unk" => Ok(Answer::Unknown),
            other => Err(format!("bad answer: {other}")),
        }
    }
}

/// Derivation rules appearing in traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Assume,
    Skolemize,
    SplitConjunction,
    InstantiateForall,
    ApplyUnicity,
    ApplySubsumption,
    ApplyProgImplication,
    ArithmeticRefutation,
    /// Complementary ground literals (or an empty clause) close a branch.
    Clash,
    /// A clause with a single surviving disjunct asserts it.
    UnitPropagate,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Rule::Assume => "assume",
            Rule::Skolemize => "skolemize",
            Rule::SplitConjunction => "split-conjunction",
            Rule::InstantiateForall => "instantiate-forall",
            Rule::ApplyUnicity => "apply-unicity",
            Rule::ApplySubsumption => "apply-subsumption",
            Rule::ApplyProgImplication => "apply-prog-implication",
            Rule::ArithmeticRefutation => "arithmetic-refutation",
            Rule::Clash => "clash",
            Rule::UnitPropagate => "unit-propagate",
        };
        f.write_str(name)
    }
}

/// One derivation step. Steps reference earlier steps by id and replay in
/// order.
#[derive(Clone, Debug)]
pub struct ProofStep {
    pub id: usize,
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub detail: String,
    /// Present on arithmetic refutations: the negative cycle.
    pub certificate: Option<Vec<DiffConstraint>>,
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:>3}] {:<22}", self.id, self.rule.to_string())?;
        if !self.premises.is_empty() {
            let ids: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
            write!(f, " from {:<12}", ids.join(","))?;
        } else {
            write!(f, "      {:<12}", "")?;
        }
        write!(f, " {}", self.detail)
    }
}

/// The verdict with its replayable trace.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub answer: Answer,
    pub trace: Vec<ProofStep>,
}

/// Resource limits for one refutation attempt.
#[derive(Clone, Copy, Debug)]
pub struct SaturationBudget {
    pub max_instantiations: usize,
    pub max_splits: usize,
    pub time_limit_ms: u64,
}

impl Default for SaturationBudget {
    fn default() -> SaturationBudget {
        SaturationBudget { max_instantiations: 200, max_splits: 8, time_limit_ms: 2000 }
    }
}

impl FromStr for SaturationBudget {
    type Err = String;

    /// `INSTANTIATIONS,SPLITS,MILLIS`, e.g. `200,8,2000`.
    fn from_str(s: &str) -> Result<SaturationBudget, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err("budget format: INSTANTIATIONS,SPLITS,MILLIS".into());
        }
        let parse = |p: &str| p.trim().parse::<u64>().map_err(|_| format!("bad number: {p}"));
        Ok(SaturationBudget {
            max_instantiations: parse(parts[0])? as usize,
            max_splits: parse(parts[1])? as usize,
            time_limit_ms: parse(parts[2])?,
        })
    }
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("both refutation attempts succeeded; the problem encoding is inconsistent")]
    InconsistentProblem,
    #[error(transparent)]
    Dl(#[from] DlError),
}

/// A summary of the saturated set when no refutation was found.
#[derive(Clone, Debug, Default)]
pub struct ClauseSet {
    pub positive_atoms: Vec<String>,
    pub negative_atoms: Vec<String>,
    pub constraints: Vec<String>,
    pub open_disjunctions: usize,
}

/// Counters a saturation run accumulates.
#[derive(Clone, Copy, Debug, Default)]
pub struct SaturationStats {
    pub instantiations: usize,
    pub splits: usize,
    /// Subsumption triggers refused because the source occurrence sits in a
    /// no-subsumption region.
    pub subsumption_guard_skips: usize,
}

/// Result of saturating one set of facts.
#[derive(Clone, Debug)]
pub enum SaturationOutcome {
    Refuted { trace: Vec<ProofStep>, stats: SaturationStats },
    Saturated { clauses: ClauseSet, trace: Vec<ProofStep>, stats: SaturationStats },
    BudgetExhausted { trace: Vec<ProofStep>, stats: SaturationStats },
}

impl SaturationOutcome {
    pub fn refuted(&self) -> bool {
        matches!(self, SaturationOutcome::Refuted { .. })
    }

    pub fn trace(&self) -> &[ProofStep] {
        match self {
            SaturationOutcome::Refuted { trace, .. }
            | SaturationOutcome::Saturated { trace, .. }
            | SaturationOutcome::BudgetExhausted { trace, .. } => trace,
        }
    }

    pub fn stats(&self) -> SaturationStats {
        match self {
            SaturationOutcome::Refuted { stats, .. }
            | SaturationOutcome::Saturated { stats, .. }
            | SaturationOutcome::BudgetExhausted { stats, .. } => *stats,
        }
    }
}

/// Decide a problem: YES attempt, then NO attempt.
pub fn decide(
    problem: &InterpretedProblem,
    axioms: &[AxiomInstance],
    budget: &SaturationBudget,
) -> Result<Verdict, DecideError> {
    // Both attempts realize the discourse quantifiers as Skolem constants;
    // the axiom instances mention the same variables and ground alike.
    let map = discourse_map(problem);
    let grounded_axioms: Vec<AxiomInstance> = axioms
        .iter()
        .map(|a| AxiomInstance {
            schema: a.schema,
            pred_name: a.pred_name.clone(),
            fixed_entity_args: a
                .fixed_entity_args
                .iter()
                .map(|t| ground_term(t, &map))
                .collect(),
            formula: instantiate_free(&a.formula, &map),
        })
        .collect();
    let yes = saturate(
        &attempt_facts(problem, &map, Polarity::RefuteNegatedHypothesis),
        &grounded_axioms,
        budget,
    )?;
    let no = saturate(
        &attempt_facts(problem, &map, Polarity::RefuteWithHypothesis),
        &grounded_axioms,
        budget,
    )?;
    match (yes.refuted(), no.refuted()) {
        (true, true) => Err(DecideError::InconsistentProblem),
        (true, false) => Ok(Verdict { answer: Answer::Yes, trace: yes.trace().to_vec() }),
        (false, true) => Ok(Verdict { answer: Answer::No, trace: no.trace().to_vec() }),
        (false, false) => {
            let mut trace = yes.trace().to_vec();
            let offset = trace.len();
            trace.extend(no.trace().iter().cloned().map(|mut s| {
                s.id += offset;
                s.premises.iter_mut().for_each(|p| *p += offset);
                s
            }));
            let exhausted = matches!(yes, SaturationOutcome::BudgetExhausted { .. })
                || matches!(no, SaturationOutcome::BudgetExhausted { .. });
            if exhausted {
                let id = trace.len();
                trace.push(ProofStep {
                    id,
                    rule: Rule::Assume,
                    premises: vec![],
                    detail: "saturation budget exhausted; verdict defaults to Unknown".into(),
                    certificate: None,
                });
            }
            Ok(Verdict { answer: Answer::Unknown, trace })
        }
    }
}

enum Polarity {
    RefuteNegatedHypothesis,
    RefuteWithHypothesis,
}

fn discourse_map(problem: &InterpretedProblem) -> BTreeMap<String, Term> {
    problem
        .discourse_quantifiers
        .iter()
        .map(|dq| (dq.name.clone(), Term::Skolem { name: dq.name.clone(), sort: dq.sort }))
        .collect()
}

fn ground_term(t: &Term, map: &BTreeMap<String, Term>) -> Term {
    match t.var_name().and_then(|n| map.get(n)) {
        Some(replacement) => replacement.clone(),
        None => t.clone(),
    }
}

fn attempt_facts(
    problem: &InterpretedProblem,
    map: &BTreeMap<String, Term>,
    polarity: Polarity,
) -> Vec<Formula> {
    let mut facts = Vec::new();
    if let Some(now) = problem.now {
        facts.push(Formula::Eq(Term::Now, Term::TimeConst(now), 0));
    }
    for dq in &problem.discourse_quantifiers {
        facts.push(instantiate_free(&dq.restrictor, map));
    }
    for p in &problem.premise_formulas {
        facts.push(instantiate_free(p, map));
    }
    let hyp = instantiate_free(&problem.hypothesis_formula, map);
    match polarity {
        Polarity::RefuteNegatedHypothesis => facts.push(Formula::not(hyp)),
        Polarity::RefuteWithHypothesis => facts.push(hyp),
    }
    facts
}

/// Saturate facts (premises plus hypothesis or its negation) under the
/// axiom instances, up to the budget.
pub fn saturate(
    facts: &[Formula],
    axioms: &[AxiomInstance],
    budget: &SaturationBudget,
) -> Result<SaturationOutcome, DlError> {
    let mut ctx = Ctx {
        budget,
        deadline: Instant::now() + Duration::from_millis(budget.time_limit_ms),
        trace: Vec::new(),
        skolems: 0,
        instantiations: 0,
        splits: 0,
        clause_ids: 0,
        exhausted: false,
        guard_skips: 0,
    };
    let mut branch = Branch::default();
    for f in facts {
        let nf = normalize(f);
        let id = ctx.step(Rule::Assume, vec![], one_line(&print_formula(&nf)), None);
        branch.pending.push_back((nf, id));
    }
    for inst in axioms {
        let nf = normalize(&inst.formula);
        let detail = format!("{} axiom for {}", inst.schema, inst.pred_name);
        let id = ctx.step(Rule::Assume, vec![], detail, None);
        match strip_forall(&nf) {
            Some((vars, matrix)) => branch.universals.push(UniClause {
                id: ctx.next_clause_id(),
                vars,
                matrix,
                origin: origin_of(inst.schema),
                step: id,
            }),
            None => branch.pending.push_back((nf, id)),
        }
    }

    let refuted = saturate_branch(&mut ctx, branch.clone(), 0)?;
    let stats = SaturationStats {
        instantiations: ctx.instantiations,
        splits: ctx.splits,
        subsumption_guard_skips: ctx.guard_skips,
    };
    Ok(match refuted {
        BranchResult::Refuted(_) => SaturationOutcome::Refuted { trace: ctx.trace, stats },
        BranchResult::Open(clauses) => {
            if ctx.exhausted {
                SaturationOutcome::BudgetExhausted { trace: ctx.trace, stats }
            } else {
                SaturationOutcome::Saturated { clauses, trace: ctx.trace, stats }
            }
        }
    })
}

fn origin_of(schema: AxiomSchema) -> Origin {
    match schema {
        AxiomSchema::Unicity => Origin::Unicity,
        AxiomSchema::Subsumption => Origin::Subsumption,
        AxiomSchema::ProgImplication => Origin::ProgImplication,
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Origin {
    Fact,
    Unicity,
    Subsumption,
    ProgImplication,
}

#[derive(Clone, Debug)]
struct Atom {
    name: String,
    entity_args: Vec<Term>,
    start: Term,
    stop: Term,
    subsumable: bool,
    episodic: bool,
    step: usize,
}

#[derive(Clone, Debug)]
struct FlatAtom {
    name: String,
    args: Vec<Term>,
    step: usize,
}

#[derive(Clone, Debug)]
struct UniClause {
    id: usize,
    vars: Vec<(String, Sort)>,
    matrix: Formula,
    origin: Origin,
    step: usize,
}

#[derive(Clone, Debug, Default)]
struct Branch {
    pending: VecDeque<(Formula, usize)>,
    pos: Vec<Atom>,
    neg: Vec<Atom>,
    pos_flat: Vec<FlatAtom>,
    neg_flat: Vec<FlatAtom>,
    arith: Vec<(DiffConstraint, usize)>,
    clauses: Vec<ClauseEntry>,
    universals: Vec<UniClause>,
    memo: BTreeSet<(usize, String)>,
    seen: BTreeSet<String>,
    version: u64,
}

#[derive(Clone, Debug)]
struct ClauseEntry {
    disjuncts: Vec<Formula>,
    step: usize,
    tested_at: u64,
}

struct Ctx<'a> {
    budget: &'a SaturationBudget,
    deadline: Instant,
    trace: Vec<ProofStep>,
    skolems: usize,
    instantiations: usize,
    splits: usize,
    clause_ids: usize,
    exhausted: bool,
    guard_skips: usize,
}

impl Ctx<'_> {
    fn step(
        &mut self,
        rule: Rule,
        premises: Vec<usize>,
        detail: String,
        certificate: Option<Vec<DiffConstraint>>,
    ) -> usize {
        let id = self.trace.len();
        self.trace.push(ProofStep { id, rule, premises, detail, certificate });
        id
    }

    fn next_clause_id(&mut self) -> usize {
        self.clause_ids += 1;
        self.clause_ids
    }

    fn out_of_time(&self) -> bool {
        Instant::now() >= self.deadline
    }
}

enum BranchResult {
    Refuted(usize),
    Open(ClauseSet),
}

fn strip_forall(f: &Formula) -> Option<(Vec<(String, Sort)>, Formula)> {
    let mut vars = Vec::new();
    let mut cur = f;
    while let Formula::Forall(v, s, body) = cur {
        vars.push((v.clone(), *s));
        cur = body;
    }
    if vars.is_empty() {
        None
    } else {
        Some((vars, cur.clone()))
    }
}

fn flatten_or(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Or(l, r) => {
            flatten_or(l, out);
            flatten_or(r, out);
        }
        other => out.push(other.clone()),
    }
}

/// Negate an arithmetic atom on the integer timeline.
fn negate_constraint(c: &Formula) -> Option<DiffConstraint> {
    match c {
        // not (a <= b + k)  ==  b <= a - k - 1
        Formula::Le(a, b, k) => Some(DiffConstraint {
            kind: BoundKind::Le,
            lhs: b.clone(),
            rhs: a.clone(),
            offset: -k - 1,
        }),
        // not (a < b + k)  ==  b <= a - k
        Formula::Lt(a, b, k) => Some(DiffConstraint {
            kind: BoundKind::Le,
            lhs: b.clone(),
            rhs: a.clone(),
            offset: -k,
        }),
        _ => None,
    }
}

fn as_constraint(f: &Formula) -> Option<DiffConstraint> {
    match f {
        Formula::Le(a, b, k) => {
            Some(DiffConstraint { kind: BoundKind::Le, lhs: a.clone(), rhs: b.clone(), offset: *k })
        }
        Formula::Lt(a, b, k) => {
            Some(DiffConstraint { kind: BoundKind::Lt, lhs: a.clone(), rhs: b.clone(), offset: *k })
        }
        Formula::Eq(a, b, k) => {
            Some(DiffConstraint { kind: BoundKind::Eq, lhs: a.clone(), rhs: b.clone(), offset: *k })
        }
        _ => None,
    }
}

fn saturate_branch(ctx: &mut Ctx, mut br: Branch, depth: usize) -> Result<BranchResult, DlError> {
    loop {
        if let Some(id) = drain_pending(ctx, &mut br)? {
            return Ok(BranchResult::Refuted(id));
        }
        if let Some(id) = closure_check(ctx, &mut br)? {
            return Ok(BranchResult::Refuted(id));
        }
        match filter_clauses(ctx, &mut br)? {
            FilterOutcome::Refuted(id) => return Ok(BranchResult::Refuted(id)),
            FilterOutcome::Progress => continue,
            FilterOutcome::Stable => {}
        }
        if ctx.out_of_time() {
            ctx.exhausted = true;
            return Ok(BranchResult::Open(summarize(&br)));
        }
        if instantiate_round(ctx, &mut br)? {
            continue;
        }
        // Stalled: split a surviving disjunction if the budget allows.
        let split_idx = br
            .clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.disjuncts.len() >= 2)
            .min_by_key(|(i, c)| (c.disjuncts.len(), *i))
            .map(|(i, _)| i);
        let Some(idx) = split_idx else {
            return Ok(BranchResult::Open(summarize(&br)));
        };
        if depth >= ctx.budget.max_splits {
            ctx.exhausted = true;
            return Ok(BranchResult::Open(summarize(&br)));
        }
        let clause = br.clauses.remove(idx);
        ctx.splits += 1;
        let total = clause.disjuncts.len();
        let mut case_steps = Vec::new();
        for (i, d) in clause.disjuncts.iter().enumerate() {
            let case = ctx.step(
                Rule::Assume,
                vec![clause.step],
                format!("case {}/{total}: {}", i + 1, one_line(&print_formula(d))),
                None,
            );
            let mut child = br.clone();
            child.pending.push_back((d.clone(), case));
            match saturate_branch(ctx, child, depth + 1)? {
                BranchResult::Refuted(id) => case_steps.push(id),
                BranchResult::Open(open) => return Ok(BranchResult::Open(open)),
            }
        }
        let id = ctx.step(
            Rule::Clash,
            case_steps,
            "all cases of the split refute".into(),
            None,
        );
        return Ok(BranchResult::Refuted(id));
    }
}

fn summarize(br: &Branch) -> ClauseSet {
    ClauseSet {
        positive_atoms: br.pos.iter().map(atom_text).collect(),
        negative_atoms: br.neg.iter().map(|a| format!("~ {}", atom_text(a))).collect(),
        constraints: br.arith.iter().map(|(c, _)| c.to_string()).collect(),
        open_disjunctions: br.clauses.iter().filter(|c| c.disjuncts.len() >= 2).count(),
    }
}

fn atom_text(a: &Atom) -> String {
    let args: Vec<String> = a
        .entity_args
        .iter()
        .map(|t| t.to_string())
        .chain([a.start.to_string(), a.stop.to_string()])
        .collect();
    format!("{} {}", a.name, args.join(" "))
}

fn drain_pending(ctx: &mut Ctx, br: &mut Branch) -> Result<Option<usize>, DlError> {
    while let Some((f, parent)) = br.pending.pop_front() {
        match f {
            Formula::And(l, r) => {
                let id = ctx.step(Rule::SplitConjunction, vec![parent], "split".into(), None);
                br.pending.push_back((*l, id));
                br.pending.push_back((*r, id));
            }
            Formula::Exists(v, sort, body) => {
                let name = format!("sk{}_{}", ctx.skolems, v);
                ctx.skolems += 1;
                let term = Term::Skolem { name: name.clone(), sort };
                let id = ctx.step(Rule::Skolemize, vec![parent], format!("{v} := {name}"), None);
                let map = BTreeMap::from([(v, term)]);
                br.pending.push_back((instantiate_free(&body, &map), id));
            }
            f @ Formula::Forall(..) => {
                let (vars, matrix) = strip_forall(&f).expect("forall strips");
                br.universals.push(UniClause {
                    id: ctx.next_clause_id(),
                    vars,
                    matrix,
                    origin: Origin::Fact,
                    step: parent,
                });
            }
            f @ Formula::Or(..) => {
                let mut disjuncts = Vec::new();
                flatten_or(&f, &mut disjuncts);
                br.clauses.push(ClauseEntry { disjuncts, step: parent, tested_at: 0 });
            }
            Formula::Pred { name, entity_args, start, stop, subsumable, episodic } => {
                let atom =
                    Atom { name, entity_args, start, stop, subsumable, episodic, step: parent };
                let key =
                    format!("+{}|{}|{}", atom_text(&atom), atom.subsumable, atom.episodic);
                if br.seen.insert(key) {
                    br.pos.push(atom);
                    br.version += 1;
                }
            }
            Formula::AtemporalPred { name, args } => {
                let key = format!("+flat {name} {args:?}");
                if br.seen.insert(key) {
                    br.pos_flat.push(FlatAtom { name, args, step: parent });
                    br.version += 1;
                }
            }
            Formula::Not(inner) => match *inner {
                Formula::Pred { name, entity_args, start, stop, subsumable, episodic } => {
                    let atom = Atom {
                        name,
                        entity_args,
                        start,
                        stop,
                        subsumable,
                        episodic,
                        step: parent,
                    };
                    let key = format!("-{}", atom_text(&atom));
                    if br.seen.insert(key) {
                        br.neg.push(atom);
                        br.version += 1;
                    }
                }
                Formula::AtemporalPred { name, args } => {
                    let key = format!("-flat {name} {args:?}");
                    if br.seen.insert(key) {
                        br.neg_flat.push(FlatAtom { name, args, step: parent });
                        br.version += 1;
                    }
                }
                Formula::Bottom => {}
                ref c @ (Formula::Le(..) | Formula::Lt(..)) => {
                    let constraint = negate_constraint(c).expect("le/lt negate");
                    push_constraint(br, constraint, parent);
                }
                Formula::Eq(a, b, k) => {
                    // not (a = b + k): a < b + k or b < a - k.
                    br.clauses.push(ClauseEntry {
                        disjuncts: vec![
                            Formula::Lt(a.clone(), b.clone(), k),
                            Formula::Lt(b, a, -k),
                        ],
                        step: parent,
                        tested_at: 0,
                    });
                }
                other => {
                    debug_assert!(false, "unexpected negation in NNF: {other:?}");
                }
            },
            ref c @ (Formula::Le(..) | Formula::Lt(..) | Formula::Eq(..)) => {
                let constraint = as_constraint(c).expect("arith atom");
                push_constraint(br, constraint, parent);
            }
            Formula::Bottom => {
                let id = ctx.step(Rule::Clash, vec![parent], "asserted absurdity".into(), None);
                return Ok(Some(id));
            }
            Formula::Implies(..) => unreachable!("implications are eliminated by normalize"),
        }
    }
    Ok(None)
}

fn push_constraint(br: &mut Branch, c: DiffConstraint, step: usize) {
    let key = format!("#{c}");
    if br.seen.insert(key) {
        br.arith.push((c, step));
        br.version += 1;
    }
}

/// Union-find over time terms from asserted zero-offset equalities.
fn eq_classes(br: &Branch) -> BTreeMap<Term, Term> {
    let mut parent: BTreeMap<Term, Term> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<Term, Term>, t: &Term) -> Term {
        let p = parent.get(t).cloned();
        match p {
            None => t.clone(),
            Some(p) if p == *t => p,
            Some(p) => {
                let r = find(parent, &p);
                parent.insert(t.clone(), r.clone());
                r
            }
        }
    }
    for (c, _) in &br.arith {
        if c.kind == BoundKind::Eq && c.offset == 0 {
            let ra = find(&mut parent, &c.lhs);
            let rb = find(&mut parent, &c.rhs);
            if ra != rb {
                parent.insert(ra, rb);
            }
        }
    }
    // Flatten.
    let keys: Vec<Term> = parent.keys().cloned().collect();
    for k in keys {
        let r = find(&mut parent, &k);
        parent.insert(k, r);
    }
    parent
}

fn rep(classes: &BTreeMap<Term, Term>, t: &Term) -> Term {
    let mut cur = t.clone();
    while let Some(next) = classes.get(&cur) {
        if *next == cur {
            break;
        }
        cur = next.clone();
    }
    cur
}

fn times_equal(classes: &BTreeMap<Term, Term>, a: &Term, b: &Term) -> bool {
    if a == b {
        return true;
    }
    rep(classes, a) == rep(classes, b)
}

fn closure_check(ctx: &mut Ctx, br: &mut Branch) -> Result<Option<usize>, DlError> {
    // Arithmetic refutation.
    let constraints: Vec<DiffConstraint> = br.arith.iter().map(|(c, _)| c.clone()).collect();
    if let SatResult::Unsat(cert) = la_sat(&constraints)? {
        debug_assert!(validate_certificate(&cert));
        let premises: Vec<usize> = cert
            .iter()
            .filter_map(|c| {
                br.arith.iter().find(|(input, _)| constraint_covers(input, c)).map(|(_, s)| *s)
            })
            .collect();
        let id = ctx.step(
            Rule::ArithmeticRefutation,
            premises,
            format!(
                "negative cycle: {}",
                cert.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("  &  ")
            ),
            Some(cert),
        );
        return Ok(Some(id));
    }
    // Complementary literals.
    let classes = eq_classes(br);
    for p in &br.pos {
        for n in &br.neg {
            if p.name == n.name
                && p.entity_args == n.entity_args
                && times_equal(&classes, &p.start, &n.start)
                && times_equal(&classes, &p.stop, &n.stop)
            {
                let id = ctx.step(
                    Rule::Clash,
                    vec![p.step, n.step],
                    format!("{} contradicts its negation", atom_text(p)),
                    None,
                );
                return Ok(Some(id));
            }
        }
    }
    for p in &br.pos_flat {
        for n in &br.neg_flat {
            if p.name == n.name && p.args == n.args {
                let id = ctx.step(
                    Rule::Clash,
                    vec![p.step, n.step],
                    format!("{} {:?} contradicts its negation", p.name, p.args),
                    None,
                );
                return Ok(Some(id));
            }
        }
    }
    Ok(None)
}

/// Does the input constraint justify the oriented certificate entry?
fn constraint_covers(input: &DiffConstraint, oriented: &DiffConstraint) -> bool {
    if input == oriented {
        return true;
    }
    if input.kind == BoundKind::Eq {
        let forward = input.lhs == oriented.lhs
            && input.rhs == oriented.rhs
            && input.offset == oriented.offset;
        let backward = input.lhs == oriented.rhs
            && input.rhs == oriented.lhs
            && input.offset == -oriented.offset;
        return forward || backward;
    }
    false
}

enum FilterOutcome {
    Refuted(usize),
    Progress,
    Stable,
}

/// Weaken stored disjunctions: drop disjuncts that close immediately when
/// asserted, propagate units, refute empty clauses.
fn filter_clauses(ctx: &mut Ctx, br: &mut Branch) -> Result<FilterOutcome, DlError> {
    let classes = eq_classes(br);
    let mut progress = false;
    let mut i = 0;
    while i < br.clauses.len() {
        if br.clauses[i].tested_at == br.version {
            i += 1;
            continue;
        }
        let entry = br.clauses[i].clone();
        let mut kept = Vec::new();
        let mut dropped_premises = vec![entry.step];
        for d in &entry.disjuncts {
            match literal_closes(br, &classes, d)? {
                Some(step) => dropped_premises.push(step),
                None => kept.push(d.clone()),
            }
        }
        if kept.is_empty() {
            let id = ctx.step(
                Rule::Clash,
                dropped_premises,
                "every disjunct of the clause refutes".into(),
                None,
            );
            return Ok(FilterOutcome::Refuted(id));
        }
        if kept.len() == 1 {
            let id = ctx.step(
                Rule::UnitPropagate,
                dropped_premises,
                format!("unit: {}", one_line(&print_formula(&kept[0]))),
                None,
            );
            br.pending.push_back((kept.remove(0), id));
            br.clauses.remove(i);
            progress = true;
            continue;
        }
        if kept.len() < entry.disjuncts.len() {
            progress = true;
        }
        br.clauses[i].disjuncts = kept;
        br.clauses[i].tested_at = br.version;
        i += 1;
    }
    Ok(if progress { FilterOutcome::Progress } else { FilterOutcome::Stable })
}

/// If asserting this literal would close the branch at once, return the
/// step id of the contradicting fact.
fn literal_closes(
    br: &Branch,
    classes: &BTreeMap<Term, Term>,
    f: &Formula,
) -> Result<Option<usize>, DlError> {
    match f {
        Formula::Pred { name, entity_args, start, stop, .. } => {
            Ok(br
                .neg
                .iter()
                .find(|n| {
                    n.name == *name
                        && n.entity_args == *entity_args
                        && times_equal(classes, &n.start, start)
                        && times_equal(classes, &n.stop, stop)
                })
                .map(|n| n.step))
        }
        Formula::AtemporalPred { name, args } => Ok(br
            .neg_flat
            .iter()
            .find(|n| n.name == *name && n.args == *args)
            .map(|n| n.step)),
        Formula::Not(inner) => match &**inner {
            Formula::Pred { name, entity_args, start, stop, .. } => Ok(br
                .pos
                .iter()
                .find(|p| {
                    p.name == *name
                        && p.entity_args == *entity_args
                        && times_equal(classes, &p.start, start)
                        && times_equal(classes, &p.stop, stop)
                })
                .map(|p| p.step)),
            Formula::AtemporalPred { name, args } => Ok(br
                .pos_flat
                .iter()
                .find(|p| p.name == *name && p.args == *args)
                .map(|p| p.step)),
            c @ (Formula::Le(..) | Formula::Lt(..)) => {
                let negated = negate_constraint(c).expect("le/lt negate");
                arith_inconsistent(br, negated)
            }
            _ => Ok(None),
        },
        c @ (Formula::Le(..) | Formula::Lt(..) | Formula::Eq(..)) => {
            let constraint = as_constraint(c).expect("arith atom");
            arith_inconsistent(br, constraint)
        }
        _ => Ok(None),
    }
}

/// Would adding this constraint make the arithmetic unsatisfiable?
fn arith_inconsistent(br: &Branch, c: DiffConstraint) -> Result<Option<usize>, DlError> {
    let mut constraints: Vec<DiffConstraint> = br.arith.iter().map(|(x, _)| x.clone()).collect();
    constraints.push(c);
    match la_sat(&constraints)? {
        SatResult::Unsat(cert) => {
            // Attribute the drop to one of the cycle's input constraints.
            let premise = cert.iter().find_map(|cc| {
                br.arith.iter().find(|(input, _)| constraint_covers(input, cc)).map(|(_, s)| *s)
            });
            Ok(Some(premise.unwrap_or(0)))
        }
        SatResult::Sat(_) => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum PatTerm {
    Var(String),
    Ground(Term),
}

#[derive(Clone, Debug)]
struct LiteralPattern {
    positive: bool,
    temporal: bool,
    name: String,
    args: Vec<PatTerm>,
}

fn pat_of(t: &Term, vars: &[(String, Sort)]) -> PatTerm {
    match t.var_name() {
        Some(n) if vars.iter().any(|(v, _)| v == n) => PatTerm::Var(n.to_string()),
        _ => PatTerm::Ground(t.clone()),
    }
}

fn collect_patterns(f: &Formula, vars: &[(String, Sort)], out: &mut Vec<LiteralPattern>) {
    match f {
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
            collect_patterns(l, vars, out);
            collect_patterns(r, vars, out);
        }
        Formula::Forall(_, _, body) | Formula::Exists(_, _, body) => {
            collect_patterns(body, vars, out)
        }
        Formula::Not(inner) => match &**inner {
            Formula::Pred { name, entity_args, start, stop, .. } => {
                let mut args: Vec<PatTerm> =
                    entity_args.iter().map(|t| pat_of(t, vars)).collect();
                args.push(pat_of(start, vars));
                args.push(pat_of(stop, vars));
                out.push(LiteralPattern {
                    positive: false,
                    temporal: true,
                    name: name.clone(),
                    args,
                });
            }
            Formula::AtemporalPred { name, args } => {
                out.push(LiteralPattern {
                    positive: false,
                    temporal: false,
                    name: name.clone(),
                    args: args.iter().map(|t| pat_of(t, vars)).collect(),
                });
            }
            _ => {}
        },
        Formula::Pred { name, entity_args, start, stop, .. } => {
            let mut args: Vec<PatTerm> = entity_args.iter().map(|t| pat_of(t, vars)).collect();
            args.push(pat_of(start, vars));
            args.push(pat_of(stop, vars));
            out.push(LiteralPattern { positive: true, temporal: true, name: name.clone(), args });
        }
        Formula::AtemporalPred { name, args } => {
            out.push(LiteralPattern {
                positive: true,
                temporal: false,
                name: name.clone(),
                args: args.iter().map(|t| pat_of(t, vars)).collect(),
            });
        }
        _ => {}
    }
}

type Subst = BTreeMap<String, Term>;

fn match_args(pattern: &[PatTerm], ground: &[Term], base: &Subst) -> Option<Subst> {
    if pattern.len() != ground.len() {
        return None;
    }
    let mut subst = base.clone();
    for (p, g) in pattern.iter().zip(ground) {
        match p {
            PatTerm::Ground(t) => {
                if t != g {
                    return None;
                }
            }
            PatTerm::Var(v) => match subst.get(v) {
                Some(bound) if bound != g => return None,
                Some(_) => {}
                None => {
                    subst.insert(v.clone(), g.clone());
                }
            },
        }
    }
    Some(subst)
}

/// Ground terms available for residual instantiation, per sort.
fn ground_terms(br: &Branch) -> (Vec<Term>, Vec<Term>) {
    let mut time: BTreeSet<Term> = BTreeSet::new();
    let mut entity: BTreeSet<Term> = BTreeSet::new();
    let add = |t: &Term, time: &mut BTreeSet<Term>, entity: &mut BTreeSet<Term>| {
        if !t.is_ground() {
            return;
        }
        match t.sort() {
            Sort::Time => {
                time.insert(t.clone());
            }
            Sort::Entity => {
                entity.insert(t.clone());
            }
        }
    };
    for a in br.pos.iter().chain(&br.neg) {
        for t in &a.entity_args {
            add(t, &mut time, &mut entity);
        }
        add(&a.start, &mut time, &mut entity);
        add(&a.stop, &mut time, &mut entity);
    }
    for a in br.pos_flat.iter().chain(&br.neg_flat) {
        for t in &a.args {
            add(t, &mut time, &mut entity);
        }
    }
    for (c, _) in &br.arith {
        add(&c.lhs, &mut time, &mut entity);
        add(&c.rhs, &mut time, &mut entity);
    }
    let mut collect_formula = |f: &Formula| {
        let mut stack = vec![f.clone()];
        while let Some(g) = stack.pop() {
            match g {
                Formula::Forall(_, _, b) | Formula::Exists(_, _, b) | Formula::Not(b) => {
                    stack.push(*b)
                }
                Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                    stack.push(*l);
                    stack.push(*r);
                }
                Formula::Pred { entity_args, start, stop, .. } => {
                    for t in &entity_args {
                        add(t, &mut time, &mut entity);
                    }
                    add(&start, &mut time, &mut entity);
                    add(&stop, &mut time, &mut entity);
                }
                Formula::AtemporalPred { args, .. } => {
                    for t in &args {
                        add(t, &mut time, &mut entity);
                    }
                }
                Formula::Le(a, b, _) | Formula::Lt(a, b, _) | Formula::Eq(a, b, _) => {
                    add(&a, &mut time, &mut entity);
                    add(&b, &mut time, &mut entity);
                }
                Formula::Bottom => {}
            }
        }
    };
    for u in &br.universals {
        collect_formula(&u.matrix);
    }
    for c in &br.clauses {
        for d in &c.disjuncts {
            collect_formula(d);
        }
    }
    (time.into_iter().collect(), entity.into_iter().collect())
}

fn instantiate_round(ctx: &mut Ctx, br: &mut Branch) -> Result<bool, DlError> {
    let (time_terms, entity_terms) = ground_terms(br);
    let mut any = false;
    let universals = br.universals.clone();
    for clause in &universals {
        if ctx.out_of_time() {
            ctx.exhausted = true;
            break;
        }
        let mut patterns = Vec::new();
        collect_patterns(&clause.matrix, &clause.vars, &mut patterns);
        // Join literal patterns against ground atoms of opposite polarity.
        // Each candidate carries the steps of the atoms it matched.
        let mut candidates: Vec<(Subst, Vec<usize>)> = vec![(Subst::new(), vec![clause.step])];
        for pat in &patterns {
            if pat.args.iter().all(|p| matches!(p, PatTerm::Ground(_))) {
                continue;
            }
            let mut extended: Vec<(Subst, Vec<usize>)> = Vec::new();
            for (subst, steps) in &candidates {
                // The pattern may stay unmatched; residual enumeration or a
                // later pattern may still bind its variables.
                extended.push((subst.clone(), steps.clone()));
                if pat.temporal {
                    let against = if pat.positive { &br.neg } else { &br.pos };
                    for atom in against {
                        if atom.name != pat.name {
                            continue;
                        }
                        // A no-subsumption occurrence never serves as the
                        // source interval of the subsumption schema.
                        if clause.origin == Origin::Subsumption
                            && !pat.positive
                            && !atom.subsumable
                        {
                            ctx.guard_skips += 1;
                            continue;
                        }
                        // Unicity pairs event reports, not instances of a
                        // law-like generic statement.
                        if clause.origin == Origin::Unicity && !atom.episodic {
                            continue;
                        }
                        let ground: Vec<Term> = atom
                            .entity_args
                            .iter()
                            .cloned()
                            .chain([atom.start.clone(), atom.stop.clone()])
                            .collect();
                        if let Some(s) = match_args(&pat.args, &ground, subst) {
                            let mut st = steps.clone();
                            st.push(atom.step);
                            extended.push((s, st));
                        }
                    }
                } else {
                    let against = if pat.positive { &br.neg_flat } else { &br.pos_flat };
                    for atom in against {
                        if atom.name != pat.name {
                            continue;
                        }
                        if let Some(s) = match_args(&pat.args, &atom.args, subst) {
                            let mut st = steps.clone();
                            st.push(atom.step);
                            extended.push((s, st));
                        }
                    }
                }
                if extended.len() > 256 {
                    break;
                }
            }
            extended.truncate(256);
            candidates = extended;
        }

        // Axiom clauses fire only when their negative predicate literals —
        // the schema's preconditions — have matched real atoms; what
        // remains unbound in a subsumption instance is the target span,
        // enumerable over the ground time terms. Fact clauses may fall
        // back to bounded enumeration of up to two unbound variables.
        let precondition_vars: BTreeSet<String> = patterns
            .iter()
            .filter(|p| !p.positive)
            .flat_map(|p| {
                p.args.iter().filter_map(|a| match a {
                    PatTerm::Var(v) => Some(v.clone()),
                    PatTerm::Ground(_) => None,
                })
            })
            .collect();
        let mut full: Vec<(Subst, Vec<usize>)> = Vec::new();
        for (subst, steps) in candidates {
            let unbound: Vec<(String, Sort)> = clause
                .vars
                .iter()
                .filter(|(v, _)| !subst.contains_key(v))
                .cloned()
                .collect();
            match clause.origin {
                Origin::Unicity | Origin::ProgImplication | Origin::Subsumption => {
                    if !precondition_vars.iter().all(|v| subst.contains_key(v)) {
                        continue;
                    }
                    if unbound.is_empty() {
                        full.push((subst, steps));
                    } else if clause.origin == Origin::Subsumption && unbound.len() <= 2 {
                        enumerate_residual(
                            &subst,
                            &steps,
                            &unbound,
                            &time_terms,
                            &entity_terms,
                            &mut full,
                        );
                    }
                }
                Origin::Fact => {
                    if unbound.is_empty() {
                        full.push((subst, steps));
                    } else if unbound.len() <= 2 {
                        enumerate_residual(
                            &subst,
                            &steps,
                            &unbound,
                            &time_terms,
                            &entity_terms,
                            &mut full,
                        );
                    }
                }
            }
        }

        for (subst, steps) in full {
            if ctx.instantiations >= ctx.budget.max_instantiations {
                ctx.exhausted = true;
                return Ok(any);
            }
            let key: String = clause
                .vars
                .iter()
                .map(|(v, _)| format!("{v}={};", subst.get(v).map(|t| t.to_string()).unwrap_or_default()))
                .collect();
            if !br.memo.insert((clause.id, key)) {
                continue;
            }
            // Skip unicity self-pairings: they only derive t = t.
            if clause.origin == Origin::Unicity {
                let distinct: BTreeSet<&usize> = steps.iter().skip(1).collect();
                if distinct.len() < 2 {
                    continue;
                }
            }
            ctx.instantiations += 1;
            let rule = match clause.origin {
                Origin::Fact => Rule::InstantiateForall,
                Origin::Unicity => Rule::ApplyUnicity,
                Origin::Subsumption => Rule::ApplySubsumption,
                Origin::ProgImplication => Rule::ApplyProgImplication,
            };
            let binding: Vec<String> = clause
                .vars
                .iter()
                .filter_map(|(v, _)| subst.get(v).map(|t| format!("{v}:={t}")))
                .collect();
            let id = ctx.step(rule, steps, binding.join(" "), None);
            let instance = instantiate_free(&clause.matrix, &subst);
            br.pending.push_back((instance, id));
            any = true;
        }
    }
    Ok(any)
}

fn enumerate_residual(
    subst: &Subst,
    steps: &[usize],
    unbound: &[(String, Sort)],
    time_terms: &[Term],
    entity_terms: &[Term],
    out: &mut Vec<(Subst, Vec<usize>)>,
) {
    match unbound {
        [] => out.push((subst.clone(), steps.to_vec())),
        [(v, sort), rest @ ..] => {
            let pool = match sort {
                Sort::Time => time_terms,
                Sort::Entity => entity_terms,
            };
            for t in pool {
                if out.len() >= 256 {
                    return;
                }
                let mut s = subst.clone();
                s.insert(v.clone(), t.clone());
                enumerate_residual(&s, steps, rest, time_terms, entity_terms, out);
            }
        }
    }
}

/// Validate a trace: ids are sequential, every premise precedes its step,
/// and every arithmetic refutation's certificate still sums to a
/// contradiction. Returns the number of closing steps.
pub fn replay_trace(trace: &[ProofStep]) -> Result<usize, String> {
    let mut closings = 0;
    for (i, step) in trace.iter().enumerate() {
        if step.id != i {
            return Err(format!("step {} has id {}", i, step.id));
        }
        for &p in &step.premises {
            if p >= step.id {
                return Err(format!("step {} cites later step {}", step.id, p));
            }
        }
        match step.rule {
            Rule::ArithmeticRefutation => {
                let cert = step
                    .certificate
                    .as_ref()
                    .ok_or_else(|| format!("step {} lacks its certificate", step.id))?;
                if !validate_certificate(cert) {
                    return Err(format!("step {} certificate does not validate", step.id));
                }
                closings += 1;
            }
            Rule::Clash => closings += 1,
            _ => {}
        }
    }
    Ok(closings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check_entailment;
    use crate::lexicon::TimePoint;

    const P262_P1: &str = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "smith_PN"))
   (advVP (useV (lexemeV "leave_V"))
     (subjS (lexemeSubj "after_Subj")
       (useCl past pPos (predVP (usePN (lexemePN "jones_PN")) (useV (lexemeV "leave_V"))))))))"#;
    const P262_P2: &str = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "jones_PN"))
   (advVP (useV (lexemeV "leave_V"))
     (subjS (lexemeSubj "after_Subj")
       (useCl past pPos (predVP (usePN (lexemePN "anderson_PN")) (useV (lexemeV "leave_V"))))))))"#;
    const P262_H: &str = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "smith_PN"))
   (advVP (useV (lexemeV "leave_V"))
     (subjS (lexemeSubj "after_Subj")
       (useCl past pPos (predVP (usePN (lexemePN "anderson_PN")) (useV (lexemeV "leave_V"))))))))"#;

    const P279_P1: &str = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "smith_PN"))
   (advVP (complSlash (slashV2a (lexemeV2 "write_V2"))
     (detCN (detQuant indefArt numSg) (useN (lexemeN "novel_N"))))
    (lexemeAdv "in_1991_Adv"))))"#;
    const P279_H: &str = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "smith_PN"))
   (advVP (complSlash (slashV2a (lexemeV2 "write_V2")) (usePron it_Pron))
    (lexemeAdv "in_1992_Adv"))))"#;
    const P280_H: &str = r#"
(useCl past pPos
 (predVP (usePN (lexemePN "smith_PN"))
   (advVP (complSlash (slashV2a (lexemeV2 "write_V2"))
     (detCN (detQuant indefArt numSg) (useN (lexemeN "novel_N"))))
    (lexemeAdv "in_1992_Adv"))))"#;

    #[test]
    fn repeated_event_with_shared_object_is_refuted() {
        let v = check_entailment(&[P279_P1], P279_H, None, None).unwrap();
        assert_eq!(v.answer, Answer::No);
    }

    #[test]
    fn repeatable_event_with_fresh_object_is_open() {
        let v = check_entailment(&[P279_P1], P280_H, None, None).unwrap();
        assert_eq!(v.answer, Answer::Unknown);
    }

    #[test]
    fn ordering_is_transitive_through_unicity() {
        let v = check_entailment(&[P262_P1, P262_P2], P262_H, None, None).unwrap();
        assert_eq!(v.answer, Answer::Yes);
    }

    #[test]
    fn saturation_of_a_bare_atom_reaches_a_fixed_point() {
        let atom = Formula::Pred {
            name: "walk_V".into(),
            entity_args: vec![Term::EntityConst("JOHN".into())],
            start: Term::TimeConst(TimePoint::new(0)),
            stop: Term::TimeConst(TimePoint::new(1)),
            subsumable: true,
            episodic: true,
        };
        let outcome = saturate(&[atom], &[], &SaturationBudget::default()).unwrap();
        match outcome {
            SaturationOutcome::Saturated { clauses, .. } => {
                assert_eq!(clauses.positive_atoms.len(), 1);
                assert_eq!(clauses.open_disjunctions, 0);
            }
            other => panic!("expected a fixed point, got {other:?}"),
        }
    }

    #[test]
    fn decide_is_deterministic() {
        let a = check_entailment(&[P279_P1], P279_H, None, None).unwrap();
        let b = check_entailment(&[P279_P1], P279_H, None, None).unwrap();
        assert_eq!(a.answer, b.answer);
        let ta: Vec<String> = a.trace.iter().map(|s| s.to_string()).collect();
        let tb: Vec<String> = b.trace.iter().map(|s| s.to_string()).collect();
        assert_eq!(ta, tb);
    }

    #[test]
    fn traces_replay() {
        for (premises, hyp) in [
            (vec![P279_P1], P279_H),
            (vec![P279_P1], P280_H),
            (vec![P262_P1, P262_P2], P262_H),
        ] {
            let v = check_entailment(&premises, hyp, None, None).unwrap();
            let closings = replay_trace(&v.trace).expect("trace replays");
            if v.answer != Answer::Unknown {
                assert!(closings > 0, "a decided verdict must close a branch");
            }
        }
    }

    #[test]
    fn budget_string_parses() {
        let b: SaturationBudget = "100,4,500".parse().unwrap();
        assert_eq!(b.max_instantiations, 100);
        assert_eq!(b.max_splits, 4);
        assert_eq!(b.time_limit_ms, 500);
        assert!("oops".parse::<SaturationBudget>().is_err());
    }

    #[test]
    fn starved_budget_reports_unknown_not_wrong() {
        let tight = SaturationBudget { max_instantiations: 1, max_splits: 0, time_limit_ms: 2000 };
        let v = check_entailment(&[P262_P1, P262_P2], P262_H, None, Some(tight)).unwrap();
        assert_eq!(v.answer, Answer::Unknown);
    }
}

#[cfg(test)]
mod soundness_tests {
    use super::*;
    use crate::axioms::generate_axioms;
    use crate::lexicon::{Lexicon, TimePoint};
    use crate::logic::eval::{truth_of, Interp};
    use crate::semantics::{DiscourseQuantifier, InterpretedProblem};
    use std::collections::{BTreeMap, BTreeSet};

    fn atom(name: &str, who: &str, a: i64, b: i64) -> Formula {
        Formula::Pred {
            name: name.into(),
            entity_args: vec![Term::EntityConst(who.into())],
            start: Term::TimeConst(TimePoint::new(a)),
            stop: Term::TimeConst(TimePoint::new(b)),
            subsumable: true,
            episodic: true,
        }
    }

    fn problem(premises: Vec<Formula>, hypothesis: Formula) -> InterpretedProblem {
        InterpretedProblem {
            premise_formulas: premises,
            hypothesis_formula: hypothesis,
            discourse_quantifiers: Vec::<DiscourseQuantifier>::new(),
            now: None,
        }
    }

    /// Build an interpretation over times 0..=5 where `walk_V JOHN` holds
    /// exactly on the given rows.
    fn interp_with(rows: &[(i64, i64)]) -> Interp {
        let mut preds: BTreeMap<String, BTreeSet<Vec<i64>>> = BTreeMap::new();
        let table: BTreeSet<Vec<i64>> = rows.iter().map(|(a, b)| vec![0, *a, *b]).collect();
        preds.insert("walk_V".into(), table);
        Interp {
            n_entities: 1,
            time_lo: 0,
            time_hi: 5,
            now: 5,
            entity_consts: BTreeMap::from([("JOHN".into(), 0)]),
            time_consts: BTreeMap::new(),
            preds,
            apreds: BTreeMap::new(),
        }
    }

    /// `decide` never answers Yes when a concrete countermodel satisfies
    /// the premises together with the negated hypothesis.
    #[test]
    fn no_yes_in_the_face_of_a_countermodel() {
        let premises = vec![atom("walk_V", "JOHN", 0, 1)];
        let hypothesis = atom("walk_V", "JOHN", 2, 3);
        let p = problem(premises.clone(), hypothesis.clone());
        let axioms = generate_axioms(&p, Lexicon::builtin());
        let verdict = decide(&p, &axioms, &SaturationBudget::default()).unwrap();

        // Countermodel: walking holds only on [0, 1].
        let counter = interp_with(&[(0, 1)]);
        assert!(truth_of(&premises[0], &counter));
        assert!(!truth_of(&hypothesis, &counter));
        // With unicity in force the two spans cannot coexist, so this is
        // refutable in the No direction, but never Yes.
        assert_ne!(verdict.answer, Answer::Yes);
    }

    #[test]
    fn identical_atoms_entail() {
        let p = problem(vec![atom("walk_V", "JOHN", 0, 1)], atom("walk_V", "JOHN", 0, 1));
        let axioms = generate_axioms(&p, Lexicon::builtin());
        let verdict = decide(&p, &axioms, &SaturationBudget::default()).unwrap();
        assert_eq!(verdict.answer, Answer::Yes);
        // Cross-check: every interpretation satisfying the premise
        // satisfies the hypothesis (they are the same atom).
        for rows in [vec![(0, 1)], vec![(0, 1), (2, 3)]] {
            let interp = interp_with(&rows);
            if truth_of(&p.premise_formulas[0], &interp) {
                assert!(truth_of(&p.hypothesis_formula, &interp));
            }
        }
    }

    #[test]
    fn stative_subsumption_entails_the_subspan() {
        // be_in over [0, 3] entails be_in over [1, 2]; the subsumption
        // axiom is part of the theory on both the symbolic and the
        // brute-force side.
        let stay = Formula::Pred {
            name: "be_in_V2".into(),
            entity_args: vec![
                Term::EntityConst("PARIS".into()),
                Term::EntityConst("SMITH".into()),
            ],
            start: Term::TimeConst(TimePoint::new(0)),
            stop: Term::TimeConst(TimePoint::new(3)),
            subsumable: true,
            episodic: true,
        };
        let mut visit = stay.clone();
        if let Formula::Pred { start, stop, .. } = &mut visit {
            *start = Term::TimeConst(TimePoint::new(1));
            *stop = Term::TimeConst(TimePoint::new(2));
        }
        let p = problem(vec![stay], visit);
        let axioms = generate_axioms(&p, Lexicon::builtin());
        assert!(!axioms.is_empty());
        let verdict = decide(&p, &axioms, &SaturationBudget::default()).unwrap();
        assert_eq!(verdict.answer, Answer::Yes);
    }
}
