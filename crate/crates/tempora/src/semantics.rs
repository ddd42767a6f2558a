//! Compositional interpretation of typed trees into logical forms.
//!
//! Every phrase is interpreted relative to a *temporal context*: an optional
//! timespan plus a subsumption-permission flag. Tense markers and temporal
//! adverbs are the nontrivial context manipulators:
//!
//! * Past tense under an unspecified context quantifies a fresh span ending
//!   strictly before `now`; present tense applies the clause at `(now, now)`.
//! * Temporal adverbs take scope above the tense: an exact adverb supplies
//!   the span outright, existential adverbs quantify a span restricted in
//!   its bounds or duration, universal adverbs quantify over sub-spans of
//!   the context. When an adverb has supplied the span, the tense creates
//!   no interval of its own (the unfolded dumps carry no end-before-now
//!   atom in that case).
//! * Duration-pinning adverbs ("for exactly a year") disable subsumption in
//!   their scope.
//!
//! Discourse state threads left-to-right through the premises: indefinites
//! introduce problem-level quantifiers the hypothesis may reference through
//! pronouns, and asserted atoms at known dates anchor "still".

use thiserror::Error;

use crate::lexicon::{
    AdverbEntry, AdverbKind, LexEntry, Lexicon, LexiconError, ReferentClass,
    SpanConstraint, SubordKind, TimePoint, VvKind,
};
use crate::logic::{Formula, Interval, Sort, Term};
use crate::syntax::{Category, TypedTree};

/// Clause tense markers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TenseTag {
    Present,
    Past,
    PresentProgressive,
    PastProgressive,
    PastPerfect,
}

impl TenseTag {
    fn from_constructor(name: &str) -> Option<TenseTag> {
        Some(match name {
            "present" => TenseTag::Present,
            "past" => TenseTag::Past,
            "presentProgressive" => TenseTag::PresentProgressive,
            "pastProgressive" => TenseTag::PastProgressive,
            "pastPerfect" => TenseTag::PastPerfect,
            _ => return None,
        })
    }

    fn progressive(self) -> bool {
        matches!(self, TenseTag::PresentProgressive | TenseTag::PastProgressive)
    }
}

/// The temporal context threaded through interpretation. An absent span is
/// the "explicitly unspecified" state that makes tense introduce its own
/// quantifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalContext {
    pub span: Option<Interval>,
    pub subsumption_allowed: bool,
    /// True inside a universally quantified span ("always", "never"): the
    /// span is generic, so a present tense does not pin `now` into it.
    pub generic_span: bool,
}

impl TemporalContext {
    pub fn unspecified() -> TemporalContext {
        TemporalContext { span: None, subsumption_allowed: true, generic_span: false }
    }

    pub fn with_span(interval: Interval) -> TemporalContext {
        TemporalContext { span: Some(interval), subsumption_allowed: true, generic_span: false }
    }
}

impl Default for TemporalContext {
    fn default() -> Self {
        TemporalContext::unspecified()
    }
}

/// Fresh-name source for quantified variables.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    n: usize,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply::default()
    }

    pub fn fresh_time(&mut self) -> String {
        let name = format!("t{}", self.n);
        self.n += 1;
        name
    }

    pub fn fresh_entity(&mut self) -> String {
        let name = format!("x{}", self.n);
        self.n += 1;
        name
    }
}

/// A discourse referent: the term a later pronoun may pick up, plus the
/// class noun and referent class used for compatibility.
#[derive(Clone, Debug)]
pub struct Referent {
    pub term: Term,
    pub class_noun: String,
    pub class: ReferentClass,
}

/// An atom asserted by an earlier premise at known dates; "still" extends
/// the most recent one with matching participants up to `now`.
#[derive(Clone, Debug)]
pub struct RecordedAtom {
    pub pred: String,
    pub entity_args: Vec<Term>,
    pub start: Term,
    pub stop: Term,
}

/// Discourse state threaded through the premises in order.
#[derive(Clone, Debug, Default)]
pub struct DiscourseEnv {
    pub referents: Vec<Referent>,
    pub recorded_atoms: Vec<RecordedAtom>,
}

/// A problem-level quantifier introduced by a premise indefinite. The
/// prover chooses its polarity per attempt: Skolem constant when proving,
/// universal when refuting.
#[derive(Clone, Debug)]
pub struct DiscourseQuantifier {
    pub name: String,
    pub sort: Sort,
    pub restrictor: Formula,
}

/// The interpreted problem: premise and hypothesis logical forms with their
/// shared discourse quantifiers.
#[derive(Clone, Debug)]
pub struct InterpretedProblem {
    pub premise_formulas: Vec<Formula>,
    pub hypothesis_formula: Formula,
    pub discourse_quantifiers: Vec<DiscourseQuantifier>,
    pub now: Option<TimePoint>,
}

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("unresolved pronoun: {0}")]
    UnresolvedPronoun(String),
    #[error("{0} needs a temporal context; tense must supply one first")]
    MissingContext(String),
    #[error("\"still\" found no earlier event with the same participants")]
    NoStillAnchor,
    #[error("unsupported construction: {0}")]
    Unsupported(String),
}

/// Apply a tense marker: quantify a span when the context leaves it open,
/// use the provided span otherwise.
///
/// With a span already supplied (by an adverb or adverbial clause) the past
/// tense adds no constraint; the unfolded dumps fix this shape. Present
/// tense constrains a supplied span to contain `now`.
pub fn apply_tense(
    supply: &mut NameSupply,
    tense: TenseTag,
    ctx: &TemporalContext,
    body: impl FnOnce(&mut NameSupply, &Interval) -> Formula,
) -> Formula {
    match (&ctx.span, tense) {
        (None, TenseTag::Past | TenseTag::PastProgressive | TenseTag::PastPerfect) => {
            let t0 = Term::TimeVar(supply.fresh_time());
            let t1 = Term::TimeVar(supply.fresh_time());
            let span = Interval::new(t0.clone(), t1.clone());
            let inner = Formula::and_all(vec![
                Formula::le(t0.clone(), t1.clone()),
                Formula::lt(t1.clone(), Term::Now),
                body(supply, &span),
            ]);
            exists_time_vars(vec![t0, t1], inner)
        }
        (None, TenseTag::Present | TenseTag::PresentProgressive) => {
            let span = Interval::new(Term::Now, Term::Now);
            body(supply, &span)
        }
        (Some(span), TenseTag::Past | TenseTag::PastProgressive) => {
            let span = span.clone();
            body(supply, &span)
        }
        (Some(span), TenseTag::Present | TenseTag::PresentProgressive) => {
            let span = span.clone();
            if ctx.generic_span {
                // A generic span ("always ...") is not anchored at the
                // utterance time.
                body(supply, &span)
            } else {
                Formula::and_all(vec![
                    Formula::le(span.start.clone(), Term::Now),
                    Formula::le(Term::Now, span.stop.clone()),
                    body(supply, &span),
                ])
            }
        }
        (Some(span), TenseTag::PastPerfect) => {
            // "had V-ed" relative to a reference span: the action closed
            // strictly before the reference opens.
            let e0 = Term::TimeVar(supply.fresh_time());
            let e1 = Term::TimeVar(supply.fresh_time());
            let inner_span = Interval::new(e0.clone(), e1.clone());
            let inner = Formula::and_all(vec![
                Formula::le(e0.clone(), e1.clone()),
                Formula::lt(e1.clone(), span.start.clone()),
                body(supply, &inner_span),
            ]);
            exists_time_vars(vec![e0, e1], inner)
        }
    }
}

fn exists_time_vars(vars: Vec<Term>, body: Formula) -> Formula {
    vars.into_iter().rev().fold(body, |acc, v| match v {
        Term::TimeVar(name) => Formula::Exists(name, Sort::Time, Box::new(acc)),
        _ => unreachable!("exists_time_vars takes time variables"),
    })
}

/// Span constraint atoms for an existential adverb, in print order: bounds
/// on the start first, then on the stop, then durations.
fn constraint_atoms(constraints: &[SpanConstraint], span: &Interval) -> Vec<Formula> {
    let mut atoms = Vec::new();
    for c in constraints {
        match c {
            SpanConstraint::SubsetOf { lo, hi } => {
                atoms.push(Formula::le(Term::TimeConst(*lo), span.start.clone()));
                atoms.push(Formula::le(span.stop.clone(), Term::TimeConst(*hi)));
            }
            SpanConstraint::EndsBefore(t) => {
                atoms.push(Formula::lt(span.stop.clone(), Term::TimeConst(*t)));
            }
            SpanConstraint::StartsAtOrAfter(t) => {
                atoms.push(Formula::le(Term::TimeConst(*t), span.start.clone()));
            }
            SpanConstraint::StartsWithin { lo, hi } => {
                atoms.push(Formula::le(Term::TimeConst(*lo), span.start.clone()));
                atoms.push(Formula::le(span.start.clone(), Term::TimeConst(*hi)));
            }
            SpanConstraint::EndsAtNow => {
                // Realized by using `now` as the span's stop term.
            }
            SpanConstraint::DurationEquals(n) => {
                atoms.push(Formula::Eq(span.stop.clone(), span.start.clone(), *n));
            }
            SpanConstraint::DurationAtLeast(n) => {
                atoms.push(Formula::Le(span.start.clone(), span.stop.clone(), -n));
            }
        }
    }
    atoms
}

/// Interpret a temporal adverb around a clause continuation.
///
/// Exact and existential adverbs ignore any span already in the context
/// (stacked time-modifying adverbs do not occur in felicitous input);
/// universal adverbs quantify over sub-spans of it. The anaphoric "still"
/// needs discourse state and is handled by problem interpretation; here it
/// passes the context through unchanged.
pub fn interpret_adverb(
    supply: &mut NameSupply,
    entry: &AdverbEntry,
    ctx: &TemporalContext,
    body: impl FnOnce(&mut NameSupply, &TemporalContext) -> Formula,
) -> Formula {
    match &entry.kind {
        AdverbKind::ExactPoint(p) => {
            let span = Interval::new(Term::TimeConst(*p), Term::TimeConst(*p));
            let ctx2 = TemporalContext {
                span: Some(span),
                generic_span: false,
                ..ctx.clone()
            };
            body(supply, &ctx2)
        }
        AdverbKind::ExistentialSpan(constraints) => {
            let start = Term::TimeVar(supply.fresh_time());
            let ends_at_now = constraints.iter().any(|c| *c == SpanConstraint::EndsAtNow);
            let stop = if ends_at_now {
                Term::Now
            } else {
                Term::TimeVar(supply.fresh_time())
            };
            let span = Interval::new(start.clone(), stop.clone());
            let mut conjuncts = constraint_atoms(constraints, &span);
            conjuncts.push(Formula::le(start.clone(), stop.clone()));
            let ctx2 = TemporalContext {
                span: Some(span),
                generic_span: false,
                ..ctx.clone()
            };
            conjuncts.push(body(supply, &ctx2));
            let mut vars = vec![start];
            if !ends_at_now {
                vars.push(stop);
            }
            exists_time_vars(vars, Formula::and_all(conjuncts))
        }
        AdverbKind::UniversalSpan { negated, ignores_context } => {
            let t0 = Term::TimeVar(supply.fresh_time());
            let t1 = Term::TimeVar(supply.fresh_time());
            let span = Interval::new(t0.clone(), t1.clone());
            let guard = match &ctx.span {
                Some(outer) if !ignores_context => Formula::and_all(vec![
                    Formula::le(outer.start.clone(), t0.clone()),
                    Formula::le(t0.clone(), t1.clone()),
                    Formula::le(t1.clone(), outer.stop.clone()),
                ]),
                _ => Formula::le(t0.clone(), t1.clone()),
            };
            let ctx2 = TemporalContext {
                span: Some(span),
                generic_span: true,
                ..ctx.clone()
            };
            let mut inner = body(supply, &ctx2);
            if *negated {
                inner = Formula::not(inner);
            }
            let matrix = Formula::implies(guard, inner);
            match (t0, t1) {
                (Term::TimeVar(a), Term::TimeVar(b)) => Formula::forall(
                    &a,
                    Sort::Time,
                    Formula::Forall(b, Sort::Time, Box::new(matrix)),
                ),
                _ => unreachable!(),
            }
        }
        AdverbKind::ClassModifier(constraint) => {
            let start = Term::TimeVar(supply.fresh_time());
            let stop = Term::TimeVar(supply.fresh_time());
            let span = Interval::new(start.clone(), stop.clone());
            let mut conjuncts = constraint_atoms(&[*constraint], &span);
            conjuncts.push(Formula::le(start.clone(), stop.clone()));
            let ctx2 = TemporalContext {
                span: Some(span),
                subsumption_allowed: false,
                generic_span: false,
            };
            conjuncts.push(body(supply, &ctx2));
            exists_time_vars(vec![start, stop], Formula::and_all(conjuncts))
        }
        AdverbKind::Still => body(supply, ctx),
    }
}

/// Interpret an action-modification verb ("finish", "start") around its
/// argument. The finishing action's span must already be in the context;
/// the argument's stop (for finish) or start (for start) point falls inside
/// it.
pub fn interpret_vv(
    supply: &mut NameSupply,
    kind: VvKind,
    ctx: &TemporalContext,
    body: impl FnOnce(&mut NameSupply, &TemporalContext) -> Formula,
) -> Result<Formula, SemanticsError> {
    let outer = ctx
        .span
        .clone()
        .ok_or_else(|| SemanticsError::MissingContext(format!("{kind:?}").to_lowercase()))?;
    let t0 = Term::TimeVar(supply.fresh_time());
    let t1 = Term::TimeVar(supply.fresh_time());
    let span = Interval::new(t0.clone(), t1.clone());
    let pinned = match kind {
        VvKind::Finish => t1.clone(),
        VvKind::Start => t0.clone(),
    };
    let mut conjuncts = vec![
        Formula::le(t0.clone(), t1.clone()),
        Formula::le(outer.start.clone(), pinned.clone()),
        Formula::le(pinned, outer.stop.clone()),
    ];
    let ctx2 = TemporalContext { span: Some(span), ..ctx.clone() };
    conjuncts.push(body(supply, &ctx2));
    Ok(exists_time_vars(vec![t0, t1], Formula::and_all(conjuncts)))
}

/// The predicate name a verb contributes under a progressive tense:
/// verbs with a progressive variant split off a `PROG_` predicate (treated
/// as stative downstream); verbs whose forms are logically interchangeable
/// and statives keep their name.
pub fn interpret_progressive(entry: &LexEntry, pred_name: &str) -> String {
    if entry.has_progressive_variant {
        format!("PROG_{pred_name}")
    } else {
        pred_name.to_string()
    }
}

/// Resolve a pronoun against the discourse environment: most recent
/// compatible referent first. "it" picks non-human referents, "she"/"he"
/// pick human ones.
pub fn resolve_pronoun(pron: &TypedTree, env: &DiscourseEnv) -> Result<Term, SemanticsError> {
    let want_human = match pron.constructor.as_str() {
        "it_Pron" => false,
        "she_Pron" | "he_Pron" => true,
        other => return Err(SemanticsError::Unsupported(format!("pronoun {other}"))),
    };
    env.referents
        .iter()
        .rev()
        .find(|r| (r.class == ReferentClass::Human) == want_human)
        .map(|r| r.term.clone())
        .ok_or_else(|| SemanticsError::UnresolvedPronoun(pron.constructor.clone()))
}

/// Interpret premises left-to-right and the hypothesis in the final
/// discourse state.
pub fn interpret_problem(
    premises: &[TypedTree],
    hypothesis: &TypedTree,
    now: Option<TimePoint>,
    lexicon: &Lexicon,
) -> Result<InterpretedProblem, SemanticsError> {
    let mut interp = Interpreter {
        lexicon,
        now,
        supply: NameSupply::new(),
        env: DiscourseEnv::default(),
        mode: Mode::Premise,
        discourse: Vec::new(),
        locals: Vec::new(),
        pending_orderings: Vec::new(),
    };
    let mut premise_formulas = Vec::new();
    for tree in premises {
        premise_formulas.push(interp.sentence(tree)?);
    }
    interp.mode = Mode::Hypothesis;
    let mut hyp = interp.sentence(hypothesis)?;
    // Hypothesis indefinites close off locally, below the discourse level.
    for (var, noun) in interp.locals.drain(..).rev() {
        hyp = Formula::Exists(
            var.clone(),
            Sort::Entity,
            Box::new(Formula::and(
                Formula::AtemporalPred { name: noun, args: vec![Term::Var(var)] },
                hyp,
            )),
        );
    }
    let problem = InterpretedProblem {
        premise_formulas,
        hypothesis_formula: hyp,
        discourse_quantifiers: interp.discourse,
        now,
    };
    // Free variables of the formulas are exactly the discourse quantifier
    // names; everything else is a constant.
    debug_assert!(problem
        .premise_formulas
        .iter()
        .chain([&problem.hypothesis_formula])
        .flat_map(|f| f.free_vars())
        .all(|v| problem.discourse_quantifiers.iter().any(|dq| dq.name == v)));
    Ok(problem)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Premise,
    Hypothesis,
}

#[derive(Clone)]
enum Layer {
    Adverb(AdverbEntry),
    Subord { kind: SubordKind, conjuncts: Vec<Formula>, span: Interval, vars: Vec<Term> },
}

#[derive(Clone)]
enum CoreVp {
    Pred { name: String, entity_args: Vec<Term> },
    Vv { kind: VvKind, layers: Vec<Layer>, inner: Box<CoreVp> },
}

struct Core {
    tense: Option<TenseTag>,
    negated: bool,
    vp: CoreVp,
}

struct Interpreter<'a> {
    lexicon: &'a Lexicon,
    now: Option<TimePoint>,
    supply: NameSupply,
    env: DiscourseEnv,
    mode: Mode,
    discourse: Vec<DiscourseQuantifier>,
    locals: Vec<(String, String)>,
    pending_orderings: Vec<(SubordKind, Interval)>,
}

impl Interpreter<'_> {
    fn sentence(&mut self, tree: &TypedTree) -> Result<Formula, SemanticsError> {
        let mut layers = Vec::new();
        let mut cur = tree;
        while cur.constructor == "advS" {
            layers.push(self.classify_adverb_node(cur.child(0))?);
            cur = cur.child(1);
        }
        if cur.constructor != "useCl" {
            return Err(SemanticsError::Unsupported(format!(
                "sentence headed by {}",
                cur.constructor
            )));
        }
        let tense = TenseTag::from_constructor(&cur.child(0).constructor).ok_or_else(|| {
            SemanticsError::Unsupported(format!("tense {}", cur.child(0).constructor))
        })?;
        let negated = cur.child(1).constructor == "pNeg";
        let clause = cur.child(2);
        if clause.constructor != "predVP" {
            return Err(SemanticsError::Unsupported(format!(
                "clause headed by {}",
                clause.constructor
            )));
        }
        let subject = self.interpret_np(clause.child(0))?;
        let (vp_layers, decorations, vp) = self.decompose_vp(clause.child(1), &subject, tense)?;
        layers.extend(vp_layers);
        let vp = decorate(vp, &decorations, tense.progressive(), self.lexicon)?;
        let core = Core { tense: Some(tense), negated, vp };
        self.wrap_layers(&layers, &TemporalContext::unspecified(), &core)
    }

    fn classify_adverb_node(&mut self, node: &TypedTree) -> Result<Layer, SemanticsError> {
        match node.constructor.as_str() {
            "lexemeAdv" => {
                let lemma = node.lexeme.as_deref().expect("lexemeAdv carries a lexeme");
                let entry = self.lexicon.adverb_semantics(lemma, self.now)?;
                Ok(Layer::Adverb(entry))
            }
            "subjS" => {
                let lemma = node.child(0).lexeme.as_deref().expect("lexemeSubj lexeme");
                let kind = self.lexicon.subord_kind(lemma)?;
                // Interpret the subordinate clause now: its referents must
                // be visible to pronouns in the main clause.
                let (conjuncts, span, vars) = self.clause_open(node.child(1))?;
                Ok(Layer::Subord { kind, conjuncts, span, vars })
            }
            other => Err(SemanticsError::Unsupported(format!("adverbial {other}"))),
        }
    }

    fn interpret_np(&mut self, np: &TypedTree) -> Result<Term, SemanticsError> {
        match np.constructor.as_str() {
            "usePN" => {
                let lemma = np.child(0).lexeme.as_deref().expect("lexemePN lexeme");
                let class = self.lexicon.name_class(lemma)?;
                let term = Term::EntityConst(const_name(lemma));
                self.env.referents.push(Referent {
                    term: term.clone(),
                    class_noun: lemma.to_string(),
                    class,
                });
                Ok(term)
            }
            "usePron" => resolve_pronoun(np.child(0), &self.env),
            "detCN" => {
                let det = np.child(0);
                let quant = det.child(0).constructor.clone();
                let num = det.child(1).constructor.clone();
                let cn = np.child(1);
                if cn.constructor != "useN" {
                    return Err(SemanticsError::Unsupported(format!(
                        "common noun {}",
                        cn.constructor
                    )));
                }
                let noun = cn.child(0).lexeme.as_deref().expect("lexemeN lexeme");
                let class = self.lexicon.noun_class(noun)?;
                if quant == "indefArt" && num == "numSg" {
                    // A singular indefinite introduces a referent; in a
                    // premise its scope extends to the whole problem.
                    let var = self.supply.fresh_entity();
                    let term = Term::Var(var.clone());
                    match self.mode {
                        Mode::Premise => self.discourse.push(DiscourseQuantifier {
                            name: var.clone(),
                            sort: Sort::Entity,
                            restrictor: Formula::AtemporalPred {
                                name: noun.to_string(),
                                args: vec![term.clone()],
                            },
                        }),
                        Mode::Hypothesis => self.locals.push((var.clone(), noun.to_string())),
                    }
                    self.env.referents.push(Referent {
                        term: term.clone(),
                        class_noun: noun.to_string(),
                        class,
                    });
                    Ok(term)
                } else {
                    // Definites and bare plurals denote per-noun constants,
                    // so repeated mentions corefer across sentences.
                    let term = Term::EntityConst(const_name(noun));
                    self.env.referents.push(Referent {
                        term: term.clone(),
                        class_noun: noun.to_string(),
                        class,
                    });
                    Ok(term)
                }
            }
            other => Err(SemanticsError::Unsupported(format!("noun phrase {other}"))),
        }
    }

    fn decompose_vp(
        &mut self,
        vp: &TypedTree,
        subject: &Term,
        tense: TenseTag,
    ) -> Result<(Vec<Layer>, Vec<String>, CoreVp), SemanticsError> {
        match vp.constructor.as_str() {
            "advVP" => {
                // The adverb on an outer advVP takes scope over everything
                // inside it, so its layer precedes the inner layers.
                let inner = vp.child(0);
                let adv = vp.child(1);
                match self.try_layer(adv)? {
                    Some(layer) => {
                        let (inner_layers, decs, core) =
                            self.decompose_vp(inner, subject, tense)?;
                        let mut layers = vec![layer];
                        layers.extend(inner_layers);
                        Ok((layers, decs, core))
                    }
                    None => {
                        // Manner adverb: decorate the predicate name.
                        // Innermost decorations end up first in the list.
                        let lemma = adv.lexeme.clone().expect("lexemeAdv lexeme");
                        let (layers, mut decs, core) =
                            self.decompose_vp(inner, subject, tense)?;
                        decs.push(lemma);
                        Ok((layers, decs, core))
                    }
                }
            }
            "complSlash" => {
                let vpslash = vp.child(0);
                if vpslash.constructor != "slashV2a" {
                    return Err(SemanticsError::Unsupported(format!(
                        "verb phrase slash {}",
                        vpslash.constructor
                    )));
                }
                let lemma = vpslash.child(0).lexeme.as_deref().expect("lexemeV2 lexeme");
                let object = self.interpret_np(vp.child(1))?;
                Ok((
                    Vec::new(),
                    Vec::new(),
                    CoreVp::Pred {
                        name: lemma.to_string(),
                        entity_args: vec![object, subject.clone()],
                    },
                ))
            }
            "useV" => {
                let lemma = vp.child(0).lexeme.as_deref().expect("lexemeV lexeme");
                Ok((
                    Vec::new(),
                    Vec::new(),
                    CoreVp::Pred { name: lemma.to_string(), entity_args: vec![subject.clone()] },
                ))
            }
            "complVV" => {
                let lemma = vp.child(0).lexeme.as_deref().expect("lexemeVV lexeme");
                let kind = self.lexicon.vv_kind(lemma)?;
                let (inner_layers, inner_decs, inner) =
                    self.decompose_vp(vp.child(1), subject, tense)?;
                // The argument of "finish"/"start" is infinitival: its
                // decorations apply, the progressive transform does not.
                let inner = decorate(inner, &inner_decs, false, self.lexicon)?;
                Ok((
                    Vec::new(),
                    Vec::new(),
                    CoreVp::Vv { kind, layers: inner_layers, inner: Box::new(inner) },
                ))
            }
            other => Err(SemanticsError::Unsupported(format!("verb phrase {other}"))),
        }
    }

    /// A temporal adverbial becomes a layer; a manner adverb returns `None`
    /// and decorates the predicate name instead.
    fn try_layer(&mut self, adv: &TypedTree) -> Result<Option<Layer>, SemanticsError> {
        match adv.constructor.as_str() {
            "lexemeAdv" => {
                let lemma = adv.lexeme.as_deref().expect("lexemeAdv carries a lexeme");
                match self.lexicon.adverb_semantics(lemma, self.now) {
                    Ok(entry) => Ok(Some(Layer::Adverb(entry))),
                    Err(LexiconError::NonTemporalAdverb(_)) => Ok(None),
                    Err(e) => Err(e.into()),
                }
            }
            "subjS" => {
                let lemma = adv.child(0).lexeme.as_deref().expect("lexemeSubj lexeme");
                let kind = self.lexicon.subord_kind(lemma)?;
                let (conjuncts, span, vars) = self.clause_open(adv.child(1))?;
                Ok(Some(Layer::Subord { kind, conjuncts, span, vars }))
            }
            other => Err(SemanticsError::Unsupported(format!("adverbial {other}"))),
        }
    }

    fn wrap_layers(
        &mut self,
        layers: &[Layer],
        ctx: &TemporalContext,
        core: &Core,
    ) -> Result<Formula, SemanticsError> {
        let Some((layer, rest)) = layers.split_first() else {
            return self.tense_and_core(ctx, core);
        };
        match layer {
            Layer::Adverb(entry) => match &entry.kind {
                AdverbKind::ExactPoint(p) => {
                    let span = Interval::new(Term::TimeConst(*p), Term::TimeConst(*p));
                    let ctx2 = TemporalContext {
                        span: Some(span),
                        generic_span: false,
                        ..ctx.clone()
                    };
                    self.wrap_layers(rest, &ctx2, core)
                }
                AdverbKind::ExistentialSpan(constraints) => {
                    let start = Term::TimeVar(self.supply.fresh_time());
                    let ends_at_now =
                        constraints.iter().any(|c| *c == SpanConstraint::EndsAtNow);
                    let stop = if ends_at_now {
                        Term::Now
                    } else {
                        Term::TimeVar(self.supply.fresh_time())
                    };
                    let span = Interval::new(start.clone(), stop.clone());
                    let mut conjuncts = constraint_atoms(constraints, &span);
                    conjuncts.push(Formula::le(start.clone(), stop.clone()));
                    let ctx2 = TemporalContext {
                        span: Some(span),
                        generic_span: false,
                        ..ctx.clone()
                    };
                    conjuncts.push(self.wrap_layers(rest, &ctx2, core)?);
                    let mut vars = vec![start];
                    if !ends_at_now {
                        vars.push(stop);
                    }
                    Ok(exists_time_vars(vars, Formula::and_all(conjuncts)))
                }
                AdverbKind::UniversalSpan { negated, ignores_context } => {
                    let t0 = Term::TimeVar(self.supply.fresh_time());
                    let t1 = Term::TimeVar(self.supply.fresh_time());
                    let span = Interval::new(t0.clone(), t1.clone());
                    let guard = match &ctx.span {
                        Some(outer) if !ignores_context => Formula::and_all(vec![
                            Formula::le(outer.start.clone(), t0.clone()),
                            Formula::le(t0.clone(), t1.clone()),
                            Formula::le(t1.clone(), outer.stop.clone()),
                        ]),
                        _ => Formula::le(t0.clone(), t1.clone()),
                    };
                    let ctx2 = TemporalContext {
                        span: Some(span),
                        generic_span: true,
                        ..ctx.clone()
                    };
                    let mut inner = self.wrap_layers(rest, &ctx2, core)?;
                    if *negated {
                        inner = Formula::not(inner);
                    }
                    let matrix = Formula::implies(guard, inner);
                    let (Term::TimeVar(a), Term::TimeVar(b)) = (t0, t1) else { unreachable!() };
                    Ok(Formula::forall(
                        &a,
                        Sort::Time,
                        Formula::Forall(b, Sort::Time, Box::new(matrix)),
                    ))
                }
                AdverbKind::ClassModifier(constraint) => {
                    let start = Term::TimeVar(self.supply.fresh_time());
                    let stop = Term::TimeVar(self.supply.fresh_time());
                    let span = Interval::new(start.clone(), stop.clone());
                    let mut conjuncts = constraint_atoms(&[*constraint], &span);
                    conjuncts.push(Formula::le(start.clone(), stop.clone()));
                    let ctx2 = TemporalContext {
                        span: Some(span),
                        subsumption_allowed: false,
                        generic_span: false,
                    };
                    conjuncts.push(self.wrap_layers(rest, &ctx2, core)?);
                    Ok(exists_time_vars(vec![start, stop], Formula::and_all(conjuncts)))
                }
                AdverbKind::Still => {
                    let args = core_entity_args(core);
                    let anchor = self
                        .env
                        .recorded_atoms
                        .iter()
                        .rev()
                        .find(|a| a.entity_args == args)
                        .ok_or(SemanticsError::NoStillAnchor)?;
                    let span = Interval::new(anchor.stop.clone(), Term::Now);
                    let ctx2 = TemporalContext {
                        span: Some(span),
                        generic_span: false,
                        ..ctx.clone()
                    };
                    self.wrap_layers(rest, &ctx2, core)
                }
            },
            Layer::Subord { kind, conjuncts, span, vars } => {
                let inner = match kind {
                    SubordKind::When => {
                        // Simultaneity: the main clause shares the
                        // subordinate interval.
                        let ctx2 = TemporalContext {
                            span: Some(span.clone()),
                            generic_span: false,
                            ..ctx.clone()
                        };
                        self.wrap_layers(rest, &ctx2, core)?
                    }
                    SubordKind::After | SubordKind::Before => {
                        self.pending_orderings.push((*kind, span.clone()));
                        self.wrap_layers(rest, ctx, core)?
                    }
                };
                let mut all = conjuncts.clone();
                all.push(inner);
                Ok(exists_time_vars(vars.clone(), Formula::and_all(all)))
            }
        }
    }

    /// Interpret a subordinate clause, exposing its span so the enclosing
    /// clause can order against it. Adverbs inside subordinate clauses are
    /// out of coverage.
    fn clause_open(
        &mut self,
        tree: &TypedTree,
    ) -> Result<(Vec<Formula>, Interval, Vec<Term>), SemanticsError> {
        if tree.constructor != "useCl" {
            return Err(SemanticsError::Unsupported(format!(
                "subordinate clause headed by {}",
                tree.constructor
            )));
        }
        let tense = TenseTag::from_constructor(&tree.child(0).constructor).ok_or_else(|| {
            SemanticsError::Unsupported(format!("tense {}", tree.child(0).constructor))
        })?;
        let negated = tree.child(1).constructor == "pNeg";
        let clause = tree.child(2);
        let subject = self.interpret_np(clause.child(0))?;
        let (layers, decorations, vp) = self.decompose_vp(clause.child(1), &subject, tense)?;
        if !layers.is_empty() {
            return Err(SemanticsError::Unsupported(
                "temporal adverbs inside a subordinate clause".into(),
            ));
        }
        let vp = decorate(vp, &decorations, tense.progressive(), self.lexicon)?;
        let core = Core { tense: None, negated, vp };
        match tense {
            TenseTag::Past | TenseTag::PastProgressive | TenseTag::PastPerfect => {
                let t0 = Term::TimeVar(self.supply.fresh_time());
                let t1 = Term::TimeVar(self.supply.fresh_time());
                let span = Interval::new(t0.clone(), t1.clone());
                let ctx = TemporalContext::with_span(span.clone());
                let atom = self.core_at_span(&ctx, &core)?;
                let conjuncts = vec![
                    Formula::le(t0.clone(), t1.clone()),
                    Formula::lt(t1.clone(), Term::Now),
                    atom,
                ];
                Ok((conjuncts, span, vec![t0, t1]))
            }
            TenseTag::Present | TenseTag::PresentProgressive => {
                let span = Interval::new(Term::Now, Term::Now);
                let ctx = TemporalContext::with_span(span.clone());
                let atom = self.core_at_span(&ctx, &core)?;
                Ok((vec![atom], span, Vec::new()))
            }
        }
    }

    fn tense_and_core(&mut self, ctx: &TemporalContext, core: &Core) -> Result<Formula, SemanticsError> {
        let Some(tense) = core.tense else {
            let span_ctx = ctx.clone();
            if span_ctx.span.is_none() {
                return Err(SemanticsError::MissingContext("untensed clause".into()));
            }
            return self.core_at_span(&span_ctx, core);
        };
        let orderings = std::mem::take(&mut self.pending_orderings);
        let emit = |this: &mut Self, span_ctx: &TemporalContext| -> Result<Vec<Formula>, SemanticsError> {
            let span = span_ctx.span.as_ref().expect("span fixed by tense");
            let mut out = Vec::new();
            for (kind, sub) in &orderings {
                match kind {
                    SubordKind::After => {
                        // Main action starts after the subordinate ends.
                        out.push(Formula::lt(sub.stop.clone(), span.start.clone()));
                    }
                    SubordKind::Before => {
                        // Main action ends before the subordinate starts.
                        out.push(Formula::lt(span.stop.clone(), sub.start.clone()));
                    }
                    SubordKind::When => unreachable!("when shares the interval"),
                }
            }
            out.push(this.core_at_span(span_ctx, core)?);
            Ok(out)
        };
        match (&ctx.span, tense) {
            (None, TenseTag::Past | TenseTag::PastProgressive | TenseTag::PastPerfect) => {
                let t0 = Term::TimeVar(self.supply.fresh_time());
                let t1 = Term::TimeVar(self.supply.fresh_time());
                let span = Interval::new(t0.clone(), t1.clone());
                let ctx2 = TemporalContext { span: Some(span), ..ctx.clone() };
                let mut conjuncts = vec![
                    Formula::le(t0.clone(), t1.clone()),
                    Formula::lt(t1.clone(), Term::Now),
                ];
                conjuncts.extend(emit(self, &ctx2)?);
                Ok(exists_time_vars(vec![t0, t1], Formula::and_all(conjuncts)))
            }
            (None, TenseTag::Present | TenseTag::PresentProgressive) => {
                let span = Interval::new(Term::Now, Term::Now);
                let ctx2 = TemporalContext { span: Some(span), ..ctx.clone() };
                Ok(Formula::and_all(emit(self, &ctx2)?))
            }
            (Some(span), TenseTag::Past | TenseTag::PastProgressive) => {
                let ctx2 = TemporalContext { span: Some(span.clone()), ..ctx.clone() };
                Ok(Formula::and_all(emit(self, &ctx2)?))
            }
            (Some(span), TenseTag::Present | TenseTag::PresentProgressive) => {
                let ctx2 = TemporalContext { span: Some(span.clone()), ..ctx.clone() };
                if ctx.generic_span {
                    // A generic span ("always ...") is not anchored at the
                    // utterance time.
                    Ok(Formula::and_all(emit(self, &ctx2)?))
                } else {
                    let mut conjuncts = vec![
                        Formula::le(span.start.clone(), Term::Now),
                        Formula::le(Term::Now, span.stop.clone()),
                    ];
                    conjuncts.extend(emit(self, &ctx2)?);
                    Ok(Formula::and_all(conjuncts))
                }
            }
            (Some(span), TenseTag::PastPerfect) => {
                let e0 = Term::TimeVar(self.supply.fresh_time());
                let e1 = Term::TimeVar(self.supply.fresh_time());
                let inner = Interval::new(e0.clone(), e1.clone());
                let ctx2 = TemporalContext { span: Some(inner), ..ctx.clone() };
                let mut conjuncts = vec![
                    Formula::le(e0.clone(), e1.clone()),
                    Formula::lt(e1.clone(), span.start.clone()),
                ];
                conjuncts.extend(emit(self, &ctx2)?);
                Ok(exists_time_vars(vec![e0, e1], Formula::and_all(conjuncts)))
            }
        }
    }

    fn core_at_span(&mut self, ctx: &TemporalContext, core: &Core) -> Result<Formula, SemanticsError> {
        let span = ctx.span.as_ref().expect("core_at_span requires a span");
        let formula = match &core.vp {
            CoreVp::Pred { name, entity_args } => {
                let atom = Formula::Pred {
                    name: name.clone(),
                    entity_args: entity_args.clone(),
                    start: span.start.clone(),
                    stop: span.stop.clone(),
                    subsumable: ctx.subsumption_allowed,
                    episodic: !ctx.generic_span,
                };
                if self.mode == Mode::Premise
                    && !core.negated
                    && span.start.is_ground()
                    && span.stop.is_ground()
                {
                    self.env.recorded_atoms.push(RecordedAtom {
                        pred: name.clone(),
                        entity_args: entity_args.clone(),
                        start: span.start.clone(),
                        stop: span.stop.clone(),
                    });
                }
                atom
            }
            CoreVp::Vv { kind, layers, inner } => {
                let t0 = Term::TimeVar(self.supply.fresh_time());
                let t1 = Term::TimeVar(self.supply.fresh_time());
                let pinned = match kind {
                    VvKind::Finish => t1.clone(),
                    VvKind::Start => t0.clone(),
                };
                let inner_span = Interval::new(t0.clone(), t1.clone());
                let ctx2 = TemporalContext { span: Some(inner_span), ..ctx.clone() };
                let inner_core =
                    Core { tense: None, negated: false, vp: (**inner).clone() };
                let body = self.wrap_layers(layers, &ctx2, &inner_core)?;
                let conjuncts = vec![
                    Formula::le(t0.clone(), t1.clone()),
                    Formula::le(span.start.clone(), pinned.clone()),
                    Formula::le(pinned, span.stop.clone()),
                    body,
                ];
                exists_time_vars(vec![t0, t1], Formula::and_all(conjuncts))
            }
        };
        Ok(if core.negated { Formula::not(formula) } else { formula })
    }
}

fn core_entity_args(core: &Core) -> Vec<Term> {
    fn of(vp: &CoreVp) -> Vec<Term> {
        match vp {
            CoreVp::Pred { entity_args, .. } => entity_args.clone(),
            CoreVp::Vv { inner, .. } => of(inner),
        }
    }
    of(&core.vp)
}

/// Apply manner decorations and (optionally) the progressive transform to
/// the core predicate name. Decorations append in attachment order
/// (innermost first); the `PROG_` prefix goes outside.
fn decorate(
    vp: CoreVp,
    decorations: &[String],
    progressive: bool,
    lexicon: &Lexicon,
) -> Result<CoreVp, SemanticsError> {
    match vp {
        CoreVp::Pred { name, entity_args } => {
            let mut decorated = name.clone();
            for d in decorations {
                decorated = format!("{decorated}__{d}");
            }
            if progressive {
                let category = verb_category(&name);
                let entry = lexicon.lookup(&name, category)?;
                decorated = interpret_progressive(entry, &decorated);
            }
            Ok(CoreVp::Pred { name: decorated, entity_args })
        }
        CoreVp::Vv { kind, layers, inner } => {
            // A progressive "was finishing to ..." is out of coverage;
            // decorations on the VV stack itself do not occur.
            let _ = decorations;
            Ok(CoreVp::Vv { kind, layers, inner })
        }
    }
}

/// Category of a verb lemma from its suffix.
pub fn verb_category(lemma: &str) -> Category {
    if lemma.ends_with("_V2") {
        Category::V2
    } else {
        Category::V
    }
}

/// Base verb lemma of a (possibly decorated, possibly `PROG_`-prefixed)
/// predicate name.
pub fn base_lemma(pred_name: &str) -> &str {
    let name = pred_name.strip_prefix("PROG_").unwrap_or(pred_name);
    match name.find("__") {
        Some(idx) => &name[..idx],
        None => name,
    }
}

fn const_name(lemma: &str) -> String {
    let stem = match lemma.rfind('_') {
        Some(idx) => &lemma[..idx],
        None => lemma,
    };
    stem.to_uppercase()
}


/// The refutation form of a problem: discourse quantifiers outermost with
/// their restrictors as antecedents, premises and hypothesis chained into an
/// implication of absurdity. This is the shape the worked dumps print.
pub fn refutation_form(problem: &InterpretedProblem) -> Formula {
    let mut body = Formula::implies(problem.hypothesis_formula.clone(), Formula::Bottom);
    for p in problem.premise_formulas.iter().rev() {
        body = Formula::implies(p.clone(), body);
    }
    for dq in problem.discourse_quantifiers.iter().rev() {
        body = Formula::Forall(
            dq.name.clone(),
            dq.sort,
            Box::new(Formula::implies(dq.restrictor.clone(), body)),
        );
    }
    body
}

/// A single sentence's logical form: its discourse quantifiers close
/// existentially over the first premise formula.
pub fn sentence_form(problem: &InterpretedProblem) -> Formula {
    let mut body = problem.premise_formulas.first().cloned().unwrap_or(Formula::Bottom);
    for dq in problem.discourse_quantifiers.iter().rev() {
        body = Formula::Exists(
            dq.name.clone(),
            dq.sort,
            Box::new(Formula::and(dq.restrictor.clone(), body)),
        );
    }
    body
}
