//! The TPTP CNF subset used by condensed detachment problems.
//!
//! Recognized clauses: the detachment clause
//! `~P(i(X,Y)) | ~P(X) | P(Y)` (literals in any order), unit positive axioms,
//! and at most one unit negative ground goal.

use std::collections::HashSet;

use crate::error::ParseError;
use crate::semantics::{AxiomAssignment, Problem};
use crate::term::{FTerm, Sym, TermKind, Var};
use crate::dterm::PrimLabel;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Var(String),
    Punct(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'%' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
        } else if c == b'/' && b.get(i + 1) == Some(&b'*') {
            let end = src[i + 2..]
                .find("*/")
                .ok_or_else(|| ParseError::malformed(i, "unterminated comment"))?;
            i += end + 4;
        } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            let s = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'$') {
                i += 1;
            }
            let word = src[s..i].to_string();
            if c.is_ascii_uppercase() || c == b'_' {
                out.push((Tok::Var(word), s));
            } else {
                out.push((Tok::Name(word), s));
            }
        } else if c == b'\'' {
            let s = i;
            i += 1;
            while i < b.len() && b[i] != b'\'' {
                i += 1;
            }
            if i >= b.len() {
                return Err(ParseError::malformed(s, "unterminated quoted name"));
            }
            i += 1;
            out.push((Tok::Name(src[s + 1..i - 1].to_string()), s));
        } else if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && b[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Name(src[s..i].to_string()), s));
        } else if b"(),.|~[]".contains(&c) {
            out.push((Tok::Punct(c as char), i));
            i += 1;
        } else {
            return Err(ParseError::malformed(i, format!("unexpected character `{}`", c as char)));
        }
    }
    Ok(out)
}

/// A parsed term before classification; variables are still TPTP names.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Raw {
    Var(String),
    App(String, Vec<Raw>),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::malformed(self.offset(), format!("expected `{c}`")))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Name(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => Err(ParseError::malformed(self.offset(), "expected a name")),
        }
    }

    fn term(&mut self) -> Result<Raw, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Raw::Var(v))
            }
            Some(Tok::Name(n)) => {
                self.pos += 1;
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::Punct('(')) {
                    self.pos += 1;
                    loop {
                        args.push(self.term()?);
                        match self.peek() {
                            Some(Tok::Punct(',')) => self.pos += 1,
                            Some(Tok::Punct(')')) => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(ParseError::malformed(self.offset(), "expected `,` or `)`")),
                        }
                    }
                }
                Ok(Raw::App(n, args))
            }
            _ => Err(ParseError::malformed(self.offset(), "expected a term")),
        }
    }

    fn literal(&mut self) -> Result<(bool, Raw), ParseError> {
        if self.peek() == Some(&Tok::Punct('~')) {
            self.pos += 1;
            Ok((false, self.term()?))
        } else {
            Ok((true, self.term()?))
        }
    }

    fn disjunction(&mut self) -> Result<Vec<(bool, Raw)>, ParseError> {
        if self.peek() == Some(&Tok::Punct('(')) {
            self.pos += 1;
            let lits = self.disjunction()?;
            self.expect(')')?;
            if self.peek() == Some(&Tok::Punct('|')) {
                self.pos += 1;
                let mut more = self.disjunction()?;
                let mut all = lits;
                all.append(&mut more);
                return Ok(all);
            }
            return Ok(lits);
        }
        let mut lits = vec![self.literal()?];
        while self.peek() == Some(&Tok::Punct('|')) {
            self.pos += 1;
            if self.peek() == Some(&Tok::Punct('(')) {
                lits.append(&mut self.disjunction()?);
            } else {
                lits.push(self.literal()?);
            }
        }
        Ok(lits)
    }
}

struct Clause {
    name: String,
    role: String,
    literals: Vec<(bool, Raw)>,
}

fn parse_clauses(src: &str) -> Result<Vec<Clause>, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        end: src.len(),
        toks,
        pos: 0,
    };
    let mut out = Vec::new();
    while p.peek().is_some() {
        let kw = p.name()?;
        if kw != "cnf" {
            return Err(ParseError::malformed(p.offset(), format!("unsupported record `{kw}`")));
        }
        p.expect('(')?;
        let name = p.name()?;
        p.expect(',')?;
        let role = p.name()?;
        p.expect(',')?;
        let literals = p.disjunction()?;
        if p.peek() == Some(&Tok::Punct(',')) {
            // Ignore source annotations.
            let mut depth = 0;
            while let Some(t) = p.peek().cloned() {
                match t {
                    Tok::Punct('(') | Tok::Punct('[') => depth += 1,
                    Tok::Punct(')') | Tok::Punct(']') if depth > 0 => depth -= 1,
                    Tok::Punct(')') => break,
                    _ => {}
                }
                p.pos += 1;
            }
        }
        p.expect(')')?;
        p.expect('.')?;
        out.push(Clause { name, role, literals });
    }
    Ok(out)
}

fn unary(lit: &Raw) -> Option<(&str, &Raw)> {
    match lit {
        Raw::App(p, args) if args.len() == 1 => Some((p, &args[0])),
        _ => None,
    }
}

/// Recognize the detachment clause; returns the predicate and the implication functor.
fn det_shape(lits: &[(bool, Raw)]) -> Option<(String, String)> {
    if lits.len() != 3 {
        return None;
    }
    let pos: Vec<&Raw> = lits.iter().filter(|l| l.0).map(|l| &l.1).collect();
    let neg: Vec<&Raw> = lits.iter().filter(|l| !l.0).map(|l| &l.1).collect();
    if pos.len() != 1 || neg.len() != 2 {
        return None;
    }
    let (pred, y) = unary(pos[0])?;
    let Raw::Var(y) = y else { return None };
    for (a, b) in [(neg[0], neg[1]), (neg[1], neg[0])] {
        let (pa, ta) = unary(a)?;
        let (pb, tb) = unary(b)?;
        if pa != pred || pb != pred {
            return None;
        }
        if let (Raw::App(f, args), Raw::Var(x)) = (ta, tb) {
            if args.len() == 2 && args[0] == Raw::Var(x.clone()) && args[1] == Raw::Var(y.clone()) && x != y {
                return Some((pred.to_string(), f.clone()));
            }
        }
    }
    None
}

fn to_fterm(t: &Raw, imp: &str) -> FTerm {
    match t {
        Raw::Var(v) => FTerm::var(Var::Name(v.as_str().into())),
        Raw::App(f, args) if args.is_empty() => FTerm::constant(f),
        Raw::App(f, args) => {
            let sym = if f == imp { Sym::imp() } else { Sym::new(f) };
            FTerm::app(sym, args.iter().map(|a| to_fterm(a, imp)).collect())
        }
    }
}

/// Parse a CD problem. Axioms are labelled `1, 2, ...` in file order.
pub fn parse_tptp_cd(src: &str, name: &str) -> Result<Problem, ParseError> {
    let clauses = parse_clauses(src)?;
    let mut det: Option<(String, String, String)> = None;
    for c in &clauses {
        if let Some((pred, f)) = det_shape(&c.literals) {
            if let Some((first, _, _)) = &det {
                return Err(ParseError::MultipleDetClauses(first.clone(), c.name.clone()));
            }
            det = Some((c.name.clone(), pred, f));
        }
    }
    let Some((det_name, pred, imp)) = det else {
        return Err(ParseError::malformed(0, "no detachment clause"));
    };
    let mut axioms = AxiomAssignment::new();
    let mut goal = None;
    let mut count = 0u32;
    for c in &clauses {
        if c.name == det_name {
            continue;
        }
        let shape = || ParseError::UnrecognizedClauseShape(c.name.clone());
        if c.literals.len() != 1 {
            return Err(shape());
        }
        let (positive, lit) = &c.literals[0];
        let (p, arg) = unary(lit).ok_or_else(shape)?;
        if p != pred {
            return Err(shape());
        }
        let t = to_fterm(arg, &imp);
        if *positive {
            count += 1;
            axioms.insert(PrimLabel::from(count), &t);
        } else {
            if !t.is_ground() || goal.is_some() {
                return Err(shape());
            }
            let _ = &c.role;
            goal = Some(t);
        }
    }
    if axioms.is_empty() {
        return Err(ParseError::malformed(0, "no axiom clause"));
    }
    Problem::new(name, axioms, goal).map_err(|e| ParseError::malformed(0, e.to_string()))
}

/// Print a problem in the same subset.
pub fn print_tptp_cd(problem: &Problem) -> String {
    fn tptp_term(t: &FTerm, out: &mut String) {
        match t.kind() {
            TermKind::Var(v) => match v {
                Var::Num(k) => out.push_str(&format!("X{k}")),
                other => out.push_str(&format!("X_{}", other.to_string().replace(['^', '.'], "_"))),
            },
            TermKind::Const(c) => out.push_str(c.name()),
            TermKind::App(f, args) => {
                out.push_str(if *f == Sym::imp() { "i" } else { f.name() });
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    tptp_term(a, out);
                }
                out.push(')');
            }
        }
    }
    let mut out = String::from(
        "cnf(det,axiom,\n    ( ~ is_a_theorem(i(X,Y))\n    | ~ is_a_theorem(X)\n    | is_a_theorem(Y) )).\n",
    );
    for l in problem.axioms.labels() {
        let mut t = String::new();
        tptp_term(problem.axioms.formula(l).expect("axiom"), &mut t);
        out.push_str(&format!("cnf(axiom_{l},axiom,\n    is_a_theorem({t}) ).\n"));
    }
    if let Some(g) = &problem.goal {
        let mut t = String::new();
        tptp_term(g, &mut t);
        out.push_str(&format!("cnf(goal,negated_conjecture,\n    ~ is_a_theorem({t}) ).\n"));
    }
    out
}

/// Names used as Skolem constants in a goal.
pub fn goal_constants(problem: &Problem) -> HashSet<String> {
    let mut out = HashSet::new();
    fn go(t: &FTerm, out: &mut HashSet<String>) {
        match t.kind() {
            TermKind::Const(c) => {
                out.insert(c.name().to_string());
            }
            TermKind::App(_, args) => args.iter().for_each(|a| go(a, out)),
            TermKind::Var(_) => {}
        }
    }
    if let Some(g) = &problem.goal {
        go(g, &mut out);
    }
    out
}
