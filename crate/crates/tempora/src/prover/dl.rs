//! Difference-logic satisfiability with negative-cycle certificates.
//!
//! Every arithmetic atom the semantics emits is a bound or ordering between
//! two time terms or a duration constraint, all of the form
//! `lhs <= rhs + c`. Satisfiability of a conjunction of such constraints is
//! negative-cycle detection in the constraint graph; strict bounds become
//! weight shifts on the integer timeline (`x < y` is `x <= y - 1`).
//!
//! `Unsat` results carry the cycle as an ordered list of oriented input
//! constraints; [`validate_certificate`] checks that the chain closes and
//! its weights sum below zero, bridging adjacent date constants by their
//! known difference. `Sat` results carry a concrete integer model.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::logic::{Sort, Term};

/// How the two sides relate: `lhs OP rhs + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundKind {
    Le,
    Lt,
    Eq,
}

/// A difference constraint over time terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiffConstraint {
    pub kind: BoundKind,
    pub lhs: Term,
    pub rhs: Term,
    pub offset: i64,
}

impl DiffConstraint {
    pub fn le(lhs: Term, rhs: Term) -> DiffConstraint {
        DiffConstraint { kind: BoundKind::Le, lhs, rhs, offset: 0 }
    }

    pub fn lt(lhs: Term, rhs: Term) -> DiffConstraint {
        DiffConstraint { kind: BoundKind::Lt, lhs, rhs, offset: 0 }
    }

    pub fn eq(lhs: Term, rhs: Term) -> DiffConstraint {
        DiffConstraint { kind: BoundKind::Eq, lhs, rhs, offset: 0 }
    }
}

impl fmt::Display for DiffConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            BoundKind::Le => "<=",
            BoundKind::Lt => "<",
            BoundKind::Eq => "=",
        };
        write!(f, "{} {op} {}", self.lhs, self.rhs)?;
        if self.offset > 0 {
            write!(f, " + {}", self.offset)?;
        } else if self.offset < 0 {
            write!(f, " - {}", -self.offset)?;
        }
        Ok(())
    }
}

/// Outcome of [`la_sat`].
#[derive(Clone, Debug)]
pub enum SatResult {
    /// A model assigning an integer to every term.
    Sat(BTreeMap<Term, i64>),
    /// An ordered negative cycle of oriented input constraints (an equality
    /// contributes the inequality direction the cycle uses).
    Unsat(Vec<DiffConstraint>),
}

#[derive(Debug, Error)]
pub enum DlError {
    #[error("constraint outside the difference fragment: {0}")]
    NonDifferenceConstraint(String),
}

#[derive(Clone, Copy)]
struct Edge {
    from: usize,
    to: usize,
    weight: i64,
    /// Index into the oriented-constraint list; anchors have none.
    source: Option<usize>,
}

/// Decide a conjunction of difference constraints.
pub fn la_sat(constraints: &[DiffConstraint]) -> Result<SatResult, DlError> {
    for c in constraints {
        if c.lhs.sort() != Sort::Time || c.rhs.sort() != Sort::Time {
            return Err(DlError::NonDifferenceConstraint(c.to_string()));
        }
    }

    // Node 0 is the origin every date constant anchors to.
    let mut nodes: Vec<Option<Term>> = vec![None];
    let mut index: BTreeMap<Term, usize> = BTreeMap::new();
    let node_of = |t: &Term, nodes: &mut Vec<Option<Term>>, index: &mut BTreeMap<Term, usize>| {
        *index.entry(t.clone()).or_insert_with(|| {
            nodes.push(Some(t.clone()));
            nodes.len() - 1
        })
    };

    // Oriented view of the input: Le/Lt keep their direction, Eq becomes
    // both directions. `oriented[i]` is what a certificate reports.
    let mut oriented: Vec<DiffConstraint> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    for c in constraints {
        let l = node_of(&c.lhs, &mut nodes, &mut index);
        let r = node_of(&c.rhs, &mut nodes, &mut index);
        match c.kind {
            BoundKind::Le | BoundKind::Lt => {
                let weight = if c.kind == BoundKind::Lt { c.offset - 1 } else { c.offset };
                oriented.push(c.clone());
                edges.push(Edge { from: r, to: l, weight, source: Some(oriented.len() - 1) });
            }
            BoundKind::Eq => {
                // lhs <= rhs + k and rhs <= lhs - k.
                oriented.push(DiffConstraint {
                    kind: BoundKind::Le,
                    lhs: c.lhs.clone(),
                    rhs: c.rhs.clone(),
                    offset: c.offset,
                });
                edges.push(Edge { from: r, to: l, weight: c.offset, source: Some(oriented.len() - 1) });
                oriented.push(DiffConstraint {
                    kind: BoundKind::Le,
                    lhs: c.rhs.clone(),
                    rhs: c.lhs.clone(),
                    offset: -c.offset,
                });
                edges.push(Edge { from: l, to: r, weight: -c.offset, source: Some(oriented.len() - 1) });
            }
        }
    }
    for (term, &idx) in &index {
        if let Term::TimeConst(p) = term {
            // term - origin = value, both directions.
            edges.push(Edge { from: 0, to: idx, weight: p.day, source: None });
            edges.push(Edge { from: idx, to: 0, weight: -p.day, source: None });
        }
    }

    let n = nodes.len();
    let mut dist = vec![0i64; n];
    let mut pred: Vec<Option<Edge>> = vec![None; n];
    for _ in 0..n {
        let mut changed = false;
        for e in &edges {
            if dist[e.from] + e.weight < dist[e.to] {
                dist[e.to] = dist[e.from] + e.weight;
                pred[e.to] = Some(*e);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // A further relaxation after n rounds witnesses a negative cycle. Apply
    // it, so the predecessor chain from the relaxed node is at least n + 1
    // steps deep and must enter the cycle.
    for e in &edges {
        if dist[e.from] + e.weight < dist[e.to] {
            dist[e.to] = dist[e.from] + e.weight;
            pred[e.to] = Some(*e);
            let cycle = extract_cycle(*e, &pred, n);
            let cert: Vec<DiffConstraint> = cycle
                .iter()
                .filter_map(|edge| edge.source.map(|i| oriented[i].clone()))
                .collect();
            debug_assert!(validate_certificate(&cert), "certificate must validate");
            return Ok(SatResult::Unsat(cert));
        }
    }

    let origin = dist[0];
    let model: BTreeMap<Term, i64> =
        index.iter().map(|(t, &i)| (t.clone(), dist[i] - origin)).collect();
    debug_assert!(model_satisfies(&model, constraints));
    Ok(SatResult::Sat(model))
}

fn extract_cycle(start: Edge, pred: &[Option<Edge>], n: usize) -> Vec<Edge> {
    // Walk predecessors n steps to land inside the cycle, then collect it.
    let mut node = start.to;
    for _ in 0..n {
        node = pred[node].expect("relaxed node has a predecessor").from;
    }
    let anchor = node;
    let mut cycle = Vec::new();
    let mut cur = anchor;
    loop {
        let e = pred[cur].expect("cycle node has a predecessor");
        cycle.push(e);
        cur = e.from;
        if cur == anchor {
            break;
        }
    }
    cycle.reverse();
    cycle
}

/// Check that a model satisfies every constraint.
pub fn model_satisfies(model: &BTreeMap<Term, i64>, constraints: &[DiffConstraint]) -> bool {
    constraints.iter().all(|c| {
        let (Some(&l), Some(&r)) = (model.get(&c.lhs), model.get(&c.rhs)) else {
            return false;
        };
        match c.kind {
            BoundKind::Le => l <= r + c.offset,
            BoundKind::Lt => l < r + c.offset,
            BoundKind::Eq => l == r + c.offset,
        }
    })
}

/// Check a negative-cycle certificate: walked as a chain of
/// `lhs <= rhs + w` steps (each edge from its rhs to its lhs), consecutive
/// endpoints must connect, either as identical terms or as two date
/// constants bridged by their exact difference, and the total weight of the
/// closed cycle must be negative, i.e. the conjunction forces `0 < 0`.
pub fn validate_certificate(cert: &[DiffConstraint]) -> bool {
    if cert.is_empty() {
        return false;
    }
    let weight = |c: &DiffConstraint| match c.kind {
        BoundKind::Lt => c.offset - 1,
        _ => c.offset,
    };
    let mut total: i64 = cert.iter().map(weight).sum();
    // Bridge lhs of step i to rhs of step i+1 (cyclically).
    for i in 0..cert.len() {
        let a = &cert[i].lhs;
        let b = &cert[(i + 1) % cert.len()].rhs;
        if a == b {
            continue;
        }
        match (a, b) {
            (Term::TimeConst(pa), Term::TimeConst(pb)) => {
                // b - a = known difference; the chain uses b <= a + (b - a).
                total += pb.day - pa.day;
            }
            _ => return false,
        }
    }
    total < 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::date_to_day;
    use crate::testutil::{difference_oracle, random_diff_constraints, XorShift};

    fn tv(n: &str) -> Term {
        Term::Skolem { name: n.into(), sort: Sort::Time }
    }

    #[test]
    fn empty_set_is_satisfiable() {
        match la_sat(&[]).unwrap() {
            SatResult::Sat(model) => assert!(model.is_empty()),
            SatResult::Unsat(_) => panic!("empty set must be satisfiable"),
        }
    }

    #[test]
    fn past_and_future_cycle_is_unsat() {
        // t0 <= t1, t1 < now, now <= t0: brute force over [-5, 5]^3 finds
        // no model, and the solver reports a 3-edge cycle.
        let cs = vec![
            DiffConstraint::le(tv("t0"), tv("t1")),
            DiffConstraint::lt(tv("t1"), Term::Now),
            DiffConstraint::le(Term::Now, tv("t0")),
        ];
        let mut count_models = 0;
        for a in -5..=5i64 {
            for b in -5..=5i64 {
                for c in -5..=5i64 {
                    if a <= b && b < c && c <= a {
                        count_models += 1;
                    }
                }
            }
        }
        assert_eq!(count_models, 0);
        match la_sat(&cs).unwrap() {
            SatResult::Unsat(cert) => {
                assert_eq!(cert.len(), 3);
                assert!(validate_certificate(&cert));
            }
            SatResult::Sat(m) => panic!("expected unsat, got model {m:?}"),
        }
    }

    #[test]
    fn repeated_action_in_disjoint_years_is_unsat() {
        // The atom set after unicity equates the two spans.
        let d = |y, m, day| Term::TimeConst(date_to_day(y, m, day).unwrap());
        let cs = vec![
            DiffConstraint::le(d(1991, 1, 1), tv("b")),
            DiffConstraint::le(tv("c"), d(1991, 12, 31)),
            DiffConstraint::le(tv("b"), tv("c")),
            DiffConstraint::eq(tv("b"), tv("f")),
            DiffConstraint::eq(tv("c"), tv("g")),
            DiffConstraint::le(d(1992, 1, 1), tv("f")),
            DiffConstraint::le(tv("g"), d(1992, 12, 31)),
            DiffConstraint::le(tv("f"), tv("g")),
        ];
        match la_sat(&cs).unwrap() {
            SatResult::Unsat(cert) => assert!(validate_certificate(&cert)),
            SatResult::Sat(m) => panic!("expected unsat, got model {m:?}"),
        }
    }

    #[test]
    fn entity_terms_are_rejected() {
        let c = DiffConstraint::le(Term::EntityConst("SMITH".into()), tv("t"));
        assert!(matches!(la_sat(&[c]), Err(DlError::NonDifferenceConstraint(_))));
    }

    #[test]
    fn agrees_with_the_brute_force_oracle() {
        let mut rng = XorShift::new(0xd1ff_0c1c);
        for case in 0..400 {
            let cs = random_diff_constraints(&mut rng);
            let expected = difference_oracle(&cs);
            match la_sat(&cs).unwrap() {
                SatResult::Sat(model) => {
                    assert!(expected, "case {case}: solver sat, oracle unsat: {cs:?}");
                    assert!(model_satisfies(&model, &cs), "case {case}: bad model");
                }
                SatResult::Unsat(cert) => {
                    assert!(!expected, "case {case}: solver unsat, oracle sat: {cs:?}");
                    assert!(validate_certificate(&cert), "case {case}: bad certificate");
                }
            }
        }
    }

    #[test]
    fn agrees_with_the_oracle_on_duration_offsets() {
        let mut rng = XorShift::new(0x0ff5e7);
        for case in 0..200 {
            let cs = crate::testutil::random_offset_constraints(&mut rng);
            let expected = difference_oracle(&cs);
            match la_sat(&cs).unwrap() {
                SatResult::Sat(model) => {
                    assert!(expected, "case {case}: solver sat, oracle unsat: {cs:?}");
                    assert!(model_satisfies(&model, &cs), "case {case}: bad model");
                }
                SatResult::Unsat(cert) => {
                    assert!(!expected, "case {case}: solver unsat, oracle sat: {cs:?}");
                    assert!(validate_certificate(&cert), "case {case}: bad certificate");
                }
            }
        }
    }

    #[test]
    fn duration_offsets_are_respected() {
        // span of exactly 365 days inside a 364-day window is unsat.
        let d = |y, m, day| Term::TimeConst(date_to_day(y, m, day).unwrap());
        let cs = vec![
            DiffConstraint { kind: BoundKind::Eq, lhs: tv("t1"), rhs: tv("t0"), offset: 365 },
            DiffConstraint::le(d(1994, 1, 1), tv("t0")),
            DiffConstraint::le(tv("t1"), d(1994, 12, 31)),
        ];
        assert!(matches!(la_sat(&cs).unwrap(), SatResult::Unsat(_)));
        let cs_ok = vec![
            DiffConstraint { kind: BoundKind::Eq, lhs: tv("t1"), rhs: tv("t0"), offset: 364 },
            DiffConstraint::le(d(1994, 1, 1), tv("t0")),
            DiffConstraint::le(tv("t1"), d(1994, 12, 31)),
        ];
        assert!(matches!(la_sat(&cs_ok).unwrap(), SatResult::Sat(_)));
    }
}
