//! Brute-force model evaluation over tiny domains.
//!
//! This is the independent oracle the tests check the symbolic machinery
//! against: quantifiers enumerate the whole domain, predicates are explicit
//! truth tables. Nothing here shares code with the prover.

use std::collections::{BTreeMap, BTreeSet};

use crate::logic::{Formula, Sort, Term};
use crate::testutil::XorShift;

/// A finite interpretation: a handful of entities, a small slice of the
/// integer timeline, and explicit relation tables.
#[derive(Clone, Debug)]
pub struct Interp {
    pub n_entities: i64,
    pub time_lo: i64,
    pub time_hi: i64,
    pub now: i64,
    pub entity_consts: BTreeMap<String, i64>,
    pub time_consts: BTreeMap<String, i64>,
    /// Temporal predicate tables, keyed by name; rows are entity values
    /// followed by the two time values.
    pub preds: BTreeMap<String, BTreeSet<Vec<i64>>>,
    /// Atemporal predicate tables.
    pub apreds: BTreeMap<String, BTreeSet<Vec<i64>>>,
}

impl Interp {
    /// A random interpretation over 2 entities and times 0..=5, matching the
    /// shapes [`crate::testutil::random_formula`] generates.
    pub fn random(rng: &mut XorShift) -> Interp {
        let mut interp = Interp {
            n_entities: 2,
            time_lo: 0,
            time_hi: 5,
            now: (rng.next_u64() % 6) as i64,
            entity_consts: BTreeMap::new(),
            time_consts: BTreeMap::new(),
            preds: BTreeMap::new(),
            apreds: BTreeMap::new(),
        };
        interp.entity_consts.insert("c0".into(), 0);
        interp.entity_consts.insert("c1".into(), 1);
        // P: one entity argument plus the two time points.
        let mut p = BTreeSet::new();
        for e in 0..2 {
            for t0 in 0..=5 {
                for t1 in 0..=5 {
                    if rng.next_u64() % 2 == 0 {
                        p.insert(vec![e, t0, t1]);
                    }
                }
            }
        }
        interp.preds.insert("P".into(), p);
        // Q: times only.
        let mut q = BTreeSet::new();
        for t0 in 0..=5 {
            for t1 in 0..=5 {
                if rng.next_u64() % 2 == 0 {
                    q.insert(vec![t0, t1]);
                }
            }
        }
        interp.preds.insert("Q".into(), q);
        // R: atemporal, one entity argument.
        let mut r = BTreeSet::new();
        for e in 0..2 {
            if rng.next_u64() % 2 == 0 {
                r.insert(vec![e]);
            }
        }
        interp.apreds.insert("R".into(), r);
        interp
    }
}

/// Truth value of a closed formula under the interpretation.
pub fn truth_of(f: &Formula, interp: &Interp) -> bool {
    eval(f, interp, &mut Vec::new())
}

fn value(t: &Term, interp: &Interp, env: &[(String, i64)]) -> i64 {
    match t {
        Term::Var(n) | Term::TimeVar(n) => env
            .iter()
            .rev()
            .find(|(name, _)| name == n)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| panic!("unbound variable {n} in evaluation")),
        Term::EntityConst(n) => interp.entity_consts.get(n).copied().unwrap_or(0),
        Term::TimeConst(p) => p.day,
        Term::Now => interp.now,
        Term::Skolem { name, sort } => match sort {
            Sort::Entity => interp.entity_consts.get(name).copied().unwrap_or(0),
            Sort::Time => interp.time_consts.get(name).copied().unwrap_or(interp.time_lo),
        },
    }
}

fn eval(f: &Formula, interp: &Interp, env: &mut Vec<(String, i64)>) -> bool {
    match f {
        Formula::Forall(v, sort, body) => domain(interp, *sort).all(|val| {
            env.push((v.clone(), val));
            let r = eval(body, interp, env);
            env.pop();
            r
        }),
        Formula::Exists(v, sort, body) => domain(interp, *sort).any(|val| {
            env.push((v.clone(), val));
            let r = eval(body, interp, env);
            env.pop();
            r
        }),
        Formula::And(l, r) => eval(l, interp, env) && eval(r, interp, env),
        Formula::Or(l, r) => eval(l, interp, env) || eval(r, interp, env),
        Formula::Implies(l, r) => !eval(l, interp, env) || eval(r, interp, env),
        Formula::Not(b) => !eval(b, interp, env),
        Formula::Bottom => false,
        Formula::Pred { name, entity_args, start, stop, .. } => {
            let mut row: Vec<i64> =
                entity_args.iter().map(|t| value(t, interp, env)).collect();
            row.push(value(start, interp, env));
            row.push(value(stop, interp, env));
            interp.preds.get(name).map(|table| table.contains(&row)).unwrap_or(false)
        }
        Formula::AtemporalPred { name, args } => {
            let row: Vec<i64> = args.iter().map(|t| value(t, interp, env)).collect();
            interp.apreds.get(name).map(|table| table.contains(&row)).unwrap_or(false)
        }
        Formula::Le(a, b, k) => value(a, interp, env) <= value(b, interp, env) + k,
        Formula::Lt(a, b, k) => value(a, interp, env) < value(b, interp, env) + k,
        Formula::Eq(a, b, k) => value(a, interp, env) == value(b, interp, env) + k,
    }
}

fn domain(interp: &Interp, sort: Sort) -> Box<dyn Iterator<Item = i64>> {
    match sort {
        Sort::Entity => Box::new(0..interp.n_entities),
        Sort::Time => Box::new(interp.time_lo..=interp.time_hi),
    }
}
