//! Deterministic generators and brute-force oracles shared by the unit and
//! acceptance tests.

use std::collections::BTreeMap;

use crate::lexicon::TimePoint;
use crate::logic::{Formula, Sort, Term};
use crate::prover::dl::{BoundKind, DiffConstraint};

/// A tiny xorshift generator; seeded runs are reproducible across platforms.
#[derive(Clone, Debug)]
pub struct XorShift {
    state: u64,
}

impl XorShift {
    pub fn new(seed: u64) -> XorShift {
        XorShift { state: seed.max(1) }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x
    }

    /// Uniform value in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Uniform value in `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % ((hi - lo + 1) as u64)) as i64
    }
}

/// A random closed formula over the fixed signature `P(e, t, t)`, `Q(t, t)`,
/// `R(e)`, entity constants `c0`/`c1`, time constants in 0..=5, and at most
/// `max_quant` quantifiers. Pairs with [`crate::logic::eval::Interp::random`].
pub fn random_formula(rng: &mut XorShift, max_quant: usize) -> Formula {
    let mut gen = Gen { rng, quant_left: max_quant, fresh: 0 };
    gen.formula(3, &mut Vec::new(), &mut Vec::new())
}

struct Gen<'a> {
    rng: &'a mut XorShift,
    quant_left: usize,
    fresh: usize,
}

impl Gen<'_> {
    fn formula(
        &mut self,
        depth: usize,
        entities: &mut Vec<String>,
        times: &mut Vec<String>,
    ) -> Formula {
        let can_quant = self.quant_left > 0 && depth > 0;
        let choice = self.rng.below(if can_quant { 8 } else { 6 });
        match choice {
            0 | 1 if depth > 0 => {
                let l = self.formula(depth - 1, entities, times);
                let r = self.formula(depth - 1, entities, times);
                if choice == 0 {
                    Formula::and(l, r)
                } else {
                    Formula::or(l, r)
                }
            }
            2 if depth > 0 => {
                let l = self.formula(depth - 1, entities, times);
                let r = self.formula(depth - 1, entities, times);
                Formula::implies(l, r)
            }
            3 if depth > 0 => Formula::not(self.formula(depth - 1, entities, times)),
            6 | 7 => {
                self.quant_left -= 1;
                let sort = if self.rng.below(2) == 0 { Sort::Entity } else { Sort::Time };
                let name = format!("v{}", self.fresh);
                self.fresh += 1;
                let stack = match sort {
                    Sort::Entity => &mut *entities,
                    Sort::Time => &mut *times,
                };
                stack.push(name.clone());
                let body = self.formula(depth.saturating_sub(1), entities, times);
                let stack = match sort {
                    Sort::Entity => entities,
                    Sort::Time => times,
                };
                stack.pop();
                if self.rng.below(2) == 0 {
                    Formula::Forall(name, sort, Box::new(body))
                } else {
                    Formula::Exists(name, sort, Box::new(body))
                }
            }
            _ => self.atom(entities, times),
        }
    }

    fn entity_term(&mut self, entities: &[String]) -> Term {
        if !entities.is_empty() && self.rng.below(2) == 0 {
            let idx = self.rng.below(entities.len() as u64) as usize;
            Term::Var(entities[idx].clone())
        } else {
            Term::EntityConst(format!("c{}", self.rng.below(2)))
        }
    }

    fn time_term(&mut self, times: &[String]) -> Term {
        let pick = self.rng.below(3);
        if pick == 0 && !times.is_empty() {
            let idx = self.rng.below(times.len() as u64) as usize;
            Term::TimeVar(times[idx].clone())
        } else if pick == 1 {
            Term::Now
        } else {
            Term::TimeConst(TimePoint::new(self.rng.range_i64(0, 5)))
        }
    }

    fn atom(&mut self, entities: &[String], times: &[String]) -> Formula {
        match self.rng.below(6) {
            0 => {
                let a = self.time_term(times);
                let b = self.time_term(times);
                Formula::Le(a, b, self.rng.range_i64(-2, 2))
            }
            1 => {
                let a = self.time_term(times);
                let b = self.time_term(times);
                Formula::Lt(a, b, 0)
            }
            2 => Formula::Pred {
                name: "P".into(),
                entity_args: vec![self.entity_term(entities)],
                start: self.time_term(times),
                stop: self.time_term(times),
                subsumable: true,
                episodic: true,
            },
            3 => Formula::Pred {
                name: "Q".into(),
                entity_args: vec![],
                start: self.time_term(times),
                stop: self.time_term(times),
                subsumable: true,
                episodic: true,
            },
            4 => Formula::AtemporalPred {
                name: "R".into(),
                args: vec![self.entity_term(entities)],
            },
            _ => Formula::Bottom,
        }
    }
}


/// A random difference-constraint set in the plain ordering fragment:
/// up to 5 variables, orderings and equalities between terms, date
/// constants in [-10, 10], no offsets.
pub fn random_diff_constraints(rng: &mut XorShift) -> Vec<DiffConstraint> {
    let n_vars = 1 + rng.below(5) as usize;
    let n_consts = rng.below(3) as usize;
    let mut terms: Vec<Term> = (0..n_vars)
        .map(|i| Term::Skolem { name: format!("v{i}"), sort: Sort::Time })
        .collect();
    for _ in 0..n_consts {
        terms.push(Term::TimeConst(TimePoint::new(rng.range_i64(-10, 10))));
    }
    let n_constraints = 1 + rng.below((n_vars + 4) as u64) as usize;
    let mut out = Vec::new();
    for _ in 0..n_constraints {
        let lhs = terms[rng.below(terms.len() as u64) as usize].clone();
        let rhs = terms[rng.below(terms.len() as u64) as usize].clone();
        let kind = match rng.below(10) {
            0..=5 => BoundKind::Le,
            6..=8 => BoundKind::Lt,
            _ => BoundKind::Eq,
        };
        out.push(DiffConstraint { kind, lhs, rhs, offset: 0 });
    }
    out
}

/// A random set in the duration fragment: up to 3 variables, offsets in
/// [-5, 5] (small, so the enumeration oracle stays cheap).
pub fn random_offset_constraints(rng: &mut XorShift) -> Vec<DiffConstraint> {
    let n_vars = 1 + rng.below(3) as usize;
    let n_consts = rng.below(3) as usize;
    let mut terms: Vec<Term> = (0..n_vars)
        .map(|i| Term::Skolem { name: format!("v{i}"), sort: Sort::Time })
        .collect();
    for _ in 0..n_consts {
        terms.push(Term::TimeConst(TimePoint::new(rng.range_i64(-10, 10))));
    }
    let n_constraints = 1 + rng.below((n_vars + 3) as u64) as usize;
    let mut out = Vec::new();
    for _ in 0..n_constraints {
        let lhs = terms[rng.below(terms.len() as u64) as usize].clone();
        let rhs = terms[rng.below(terms.len() as u64) as usize].clone();
        let kind = match rng.below(10) {
            0..=5 => BoundKind::Le,
            6..=8 => BoundKind::Lt,
            _ => BoundKind::Eq,
        };
        out.push(DiffConstraint { kind, lhs, rhs, offset: rng.range_i64(-5, 5) });
    }
    out
}

/// Brute-force satisfiability of a difference-constraint set by exhaustive
/// assignment enumeration, independent of the graph solver.
///
/// Connected components of the constraint graph are independent, so each is
/// searched separately. Within a component the window is sound: a single
/// constraint moves a value by at most `W + 1` (its offset plus one for
/// strictness), so a satisfiable component has a model with every variable
/// within `k * (W + 1)` of a date constant, or of one arbitrarily pinned
/// variable when the component has no constant (solutions shift freely).
pub fn difference_oracle(constraints: &[DiffConstraint]) -> bool {
    // Component discovery over all terms.
    let mut terms: Vec<Term> = Vec::new();
    for c in constraints {
        for t in [&c.lhs, &c.rhs] {
            if !terms.contains(t) {
                terms.push(t.clone());
            }
        }
    }
    let idx = |t: &Term| terms.iter().position(|u| u == t).unwrap();
    let mut parent: Vec<usize> = (0..terms.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for c in constraints {
        let (a, b) = (idx(&c.lhs), idx(&c.rhs));
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let roots: Vec<usize> = {
        let mut seen = Vec::new();
        for i in 0..terms.len() {
            let r = find(&mut parent, i);
            if !seen.contains(&r) {
                seen.push(r);
            }
        }
        seen
    };
    for root in roots {
        let members: Vec<Term> = (0..terms.len())
            .filter(|&i| find(&mut parent, i) == root)
            .map(|i| terms[i].clone())
            .collect();
        let local: Vec<DiffConstraint> = constraints
            .iter()
            .filter(|c| members.contains(&c.lhs))
            .cloned()
            .collect();
        if !component_satisfiable(&members, &local) {
            return false;
        }
    }
    true
}

fn component_satisfiable(members: &[Term], constraints: &[DiffConstraint]) -> bool {
    let mut vars: Vec<Term> = Vec::new();
    let mut anchors: Vec<i64> = Vec::new();
    let mut assignment: BTreeMap<Term, i64> = BTreeMap::new();
    for t in members {
        match t {
            Term::TimeConst(p) => {
                anchors.push(p.day);
                assignment.insert(t.clone(), p.day);
            }
            other => vars.push(other.clone()),
        }
    }
    if vars.is_empty() {
        return check_all(constraints, &assignment);
    }
    let max_w = constraints.iter().map(|c| c.offset.abs()).max().unwrap_or(0);
    let slack = (vars.len() as i64 + 1) * (max_w + 1);
    let (lo, hi) = if anchors.is_empty() {
        // Pin the first variable; the rest range around it.
        (-slack, slack)
    } else {
        (
            anchors.iter().min().unwrap() - slack,
            anchors.iter().max().unwrap() + slack,
        )
    };

    // Order variables so each (after the first) shares a constraint with an
    // assigned term, for early pruning.
    let mut order: Vec<Term> = Vec::new();
    let mut remaining = vars.clone();
    while !remaining.is_empty() {
        let pick = remaining
            .iter()
            .position(|v| {
                constraints.iter().any(|c| {
                    let other = if c.lhs == *v {
                        Some(&c.rhs)
                    } else if c.rhs == *v {
                        Some(&c.lhs)
                    } else {
                        None
                    };
                    other.map(|o| {
                        matches!(o, Term::TimeConst(_)) || order.contains(o)
                    }) == Some(true)
                })
            })
            .unwrap_or(0);
        order.push(remaining.remove(pick));
    }

    let pin_first = anchors.is_empty();
    search(&order, 0, constraints, lo, hi, pin_first, &mut assignment)
}

fn search(
    order: &[Term],
    depth: usize,
    constraints: &[DiffConstraint],
    lo: i64,
    hi: i64,
    pin_first: bool,
    assignment: &mut BTreeMap<Term, i64>,
) -> bool {
    if depth == order.len() {
        return check_all(constraints, assignment);
    }
    let var = &order[depth];
    let (vlo, vhi) = if depth == 0 && pin_first { (0, 0) } else { (lo, hi) };
    for val in vlo..=vhi {
        assignment.insert(var.clone(), val);
        if partial_ok(constraints, assignment)
            && search(order, depth + 1, constraints, lo, hi, pin_first, assignment)
        {
            assignment.remove(var);
            return true;
        }
    }
    assignment.remove(var);
    false
}

fn holds(c: &DiffConstraint, l: i64, r: i64) -> bool {
    match c.kind {
        BoundKind::Le => l <= r + c.offset,
        BoundKind::Lt => l < r + c.offset,
        BoundKind::Eq => l == r + c.offset,
    }
}

fn partial_ok(constraints: &[DiffConstraint], assignment: &BTreeMap<Term, i64>) -> bool {
    constraints.iter().all(|c| match (assignment.get(&c.lhs), assignment.get(&c.rhs)) {
        (Some(&l), Some(&r)) => holds(c, l, r),
        _ => true,
    })
}

fn check_all(constraints: &[DiffConstraint], assignment: &BTreeMap<Term, i64>) -> bool {
    constraints.iter().all(|c| holds(c, assignment[&c.lhs], assignment[&c.rhs]))
}
