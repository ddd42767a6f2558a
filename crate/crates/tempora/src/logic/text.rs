//! Printing formulas in the unfolded dump style and reading them back.
//!
//! The reader exists for golden tests: printed formulas are stored as text
//! files and compared token-wise after alpha-normalization. It handles
//! exactly the fragment the printer emits.

use std::fmt::Write as _;

use thiserror::Error;

use crate::lexicon::TimePoint;
use crate::logic::{Formula, Sort, Term};

/// Render a formula. Binder groups collapse (`exists b c : Z,`), entity
/// binders print as `object` and time binders as `Z`, implications break the
/// line. The output reparses with [`parse_formula`].
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    render(f, 0, &mut out);
    out
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) | Formula::Forall(..) | Formula::Exists(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Not(..) => 3,
        _ => 4,
    }
}

fn render(f: &Formula, min_prec: u8, out: &mut String) {
    if level(f) < min_prec {
        out.push('(');
        render(f, 0, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Forall(..) | Formula::Exists(..) => {
            let existential = matches!(f, Formula::Exists(..));
            let mut names = Vec::new();
            let mut cursor = f;
            let sort = match f {
                Formula::Forall(_, s, _) | Formula::Exists(_, s, _) => *s,
                _ => unreachable!(),
            };
            loop {
                match cursor {
                    Formula::Forall(v, s, body) if !existential && *s == sort => {
                        names.push(v.clone());
                        cursor = body;
                    }
                    Formula::Exists(v, s, body) if existential && *s == sort => {
                        names.push(v.clone());
                        cursor = body;
                    }
                    _ => break,
                }
            }
            let kw = if existential { "exists" } else { "forall" };
            let _ = write!(out, "{kw} {} : {sort},\n", names.join(" "));
            render(cursor, 0, out);
        }
        Formula::Implies(l, r) => {
            render(l, 1, out);
            out.push_str(" ->\n");
            render(r, 0, out);
        }
        Formula::Or(l, r) => {
            render(l, 2, out);
            out.push_str(" \\/ ");
            render(r, 1, out);
        }
        Formula::And(l, r) => {
            render(l, 3, out);
            out.push_str(" /\\ ");
            render(r, 2, out);
        }
        Formula::Not(b) => {
            out.push_str("~ ");
            render(b, 4, out);
        }
        Formula::Bottom => out.push_str("False"),
        Formula::Pred { name, entity_args, start, stop, .. } => {
            out.push_str(name);
            for t in entity_args {
                let _ = write!(out, " {t}");
            }
            let _ = write!(out, " {start} {stop}");
        }
        Formula::AtemporalPred { name, args } => {
            out.push_str(name);
            for t in args {
                let _ = write!(out, " {t}");
            }
        }
        Formula::Le(a, b, k) => render_cmp(out, a, "<=", b, *k),
        Formula::Lt(a, b, k) => render_cmp(out, a, "<", b, *k),
        Formula::Eq(a, b, k) => render_cmp(out, a, "=", b, *k),
    }
}

fn render_cmp(out: &mut String, a: &Term, op: &str, b: &Term, k: i64) {
    let _ = write!(out, "{a} {op} {b}");
    if k > 0 {
        let _ = write!(out, " + {k}");
    } else if k < 0 {
        let _ = write!(out, " - {}", -k);
    }
}

/// Split printed-formula text into comparison tokens: parentheses, commas
/// and colons stand alone, everything else splits on whitespace.
pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' | ',' | ':' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

#[derive(Debug, Error)]
#[error("formula parse error: {0}")]
pub struct FormulaParseError(pub String);

/// Parse a formula printed by [`print()`].
pub fn parse_formula(text: &str) -> Result<Formula, FormulaParseError> {
    let toks = tokens(text);
    let mut parser = Parser { toks, pos: 0, scope: Vec::new() };
    let f = parser.formula()?;
    if parser.pos != parser.toks.len() {
        return Err(FormulaParseError(format!(
            "trailing input at token {}: {}",
            parser.pos, parser.toks[parser.pos]
        )));
    }
    Ok(f)
}

struct Parser {
    toks: Vec<String>,
    pos: usize,
    scope: Vec<(String, Sort)>,
}

impl Parser {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(|s| s.as_str())
    }

    fn bump(&mut self) -> Option<String> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &str) -> Result<(), FormulaParseError> {
        match self.bump() {
            Some(t) if t == want => Ok(()),
            other => Err(FormulaParseError(format!("expected {want}, got {:?}", other))),
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.or_expr()?;
        if self.peek() == Some("->") {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.and_expr()?;
        if self.peek() == Some("\\/") {
            self.bump();
            let rhs = self.or_expr()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.unary()?;
        if self.peek() == Some("/\\") {
            self.bump();
            let rhs = self.and_expr()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaParseError> {
        match self.peek() {
            Some("~") => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some("(") => {
                self.bump();
                let f = self.formula()?;
                self.expect(")")?;
                Ok(f)
            }
            Some("forall") | Some("exists") => self.quantifier(),
            Some("False") => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Some(_) => self.atom(),
            None => Err(FormulaParseError("unexpected end of input".into())),
        }
    }

    fn quantifier(&mut self) -> Result<Formula, FormulaParseError> {
        let kw = self.bump().unwrap();
        let mut names = Vec::new();
        while let Some(t) = self.peek() {
            if t == ":" {
                break;
            }
            names.push(self.bump().unwrap());
        }
        if names.is_empty() {
            return Err(FormulaParseError("quantifier with no variables".into()));
        }
        self.expect(":")?;
        let sort = match self.bump().as_deref() {
            Some("object") => Sort::Entity,
            Some("Z") => Sort::Time,
            other => return Err(FormulaParseError(format!("bad sort: {:?}", other))),
        };
        self.expect(",")?;
        for n in &names {
            self.scope.push((n.clone(), sort));
        }
        let body = self.formula()?;
        for _ in &names {
            self.scope.pop();
        }
        let mut out = body;
        for n in names.into_iter().rev() {
            out = if kw == "forall" {
                Formula::Forall(n, sort, Box::new(out))
            } else {
                Formula::Exists(n, sort, Box::new(out))
            };
        }
        Ok(out)
    }

    fn is_term_start(tok: &str) -> bool {
        let reserved = [
            "(", ")", ",", ":", "->", "/\\", "\\/", "<=", "<", "=", "~", "+", "-", "forall",
            "exists", "False",
        ];
        !reserved.contains(&tok)
    }

    fn atom(&mut self) -> Result<Formula, FormulaParseError> {
        let head = self.bump().unwrap();
        let head_term = self.term_of(&head)?;
        match self.peek() {
            Some(op @ ("<=" | "<" | "=")) => {
                let op = op.to_string();
                self.bump();
                let rhs_tok = self
                    .bump()
                    .ok_or_else(|| FormulaParseError("comparison missing rhs".into()))?;
                let rhs = self.term_of(&rhs_tok)?;
                let mut offset = 0i64;
                if let Some(sign @ ("+" | "-")) = self.peek() {
                    let neg = sign == "-";
                    self.bump();
                    let num = self
                        .bump()
                        .ok_or_else(|| FormulaParseError("offset missing number".into()))?;
                    let n: i64 = num
                        .parse()
                        .map_err(|_| FormulaParseError(format!("bad offset: {num}")))?;
                    offset = if neg { -n } else { n };
                }
                Ok(match op.as_str() {
                    "<=" => Formula::Le(head_term, rhs, offset),
                    "<" => Formula::Lt(head_term, rhs, offset),
                    _ => Formula::Eq(head_term, rhs, offset),
                })
            }
            _ => {
                // Predicate application: gather argument terms.
                let mut args = Vec::new();
                while let Some(t) = self.peek() {
                    if !Self::is_term_start(t) {
                        break;
                    }
                    let tok = self.bump().unwrap();
                    args.push(self.term_of(&tok)?);
                }
                let time_tail = args
                    .iter()
                    .rev()
                    .take_while(|t| t.sort() == Sort::Time)
                    .count();
                if time_tail >= 2 {
                    let stop = args.pop().unwrap();
                    let start = args.pop().unwrap();
                    Ok(Formula::Pred {
                        name: head,
                        entity_args: args,
                        start,
                        stop,
                        subsumable: true,
                        episodic: true,
                    })
                } else {
                    Ok(Formula::AtemporalPred { name: head, args })
                }
            }
        }
    }

    fn term_of(&self, tok: &str) -> Result<Term, FormulaParseError> {
        if tok == "now" {
            return Ok(Term::Now);
        }
        if let Some(digits) = tok.strip_prefix("Date_") {
            if digits.len() == 8 && digits.chars().all(|c| c.is_ascii_digit()) {
                let y: i32 = digits[0..4].parse().unwrap();
                let m: u32 = digits[4..6].parse().unwrap();
                let d: u32 = digits[6..8].parse().unwrap();
                let tp = TimePoint::from_ymd(y, m, d)
                    .map_err(|e| FormulaParseError(e.to_string()))?;
                return Ok(Term::TimeConst(tp));
            }
        }
        if let Some((_, sort)) = self.scope.iter().rev().find(|(n, _)| n == tok) {
            return Ok(match sort {
                Sort::Entity => Term::Var(tok.to_string()),
                Sort::Time => Term::TimeVar(tok.to_string()),
            });
        }
        Ok(Term::EntityConst(tok.to_string()))
    }
}
