//! Proof corpus files.
//!
//! ```text
//! # comment
//! 1 : CCCpqrCCrpCsp
//! 2 = DDD1D111n : CCCpqpCrp
//! * 17 = DD13.D16.16.13 : CCpqCCqrCpr
//! ```
//!
//! `label : formula` assigns an axiom. `label = D-term` binds a derived step,
//! optionally followed by `: formula`, the displayed lemma. A leading `*` marks
//! a goal root. Labels must be defined before use.

use std::collections::HashSet;

use indexmap::IndexMap;

use crate::compacted::CompactedDTerm;
use crate::dterm::{DTerm, PrimLabel};
use crate::error::ParseError;
use crate::formats::{dnotation, polish};
use crate::semantics::AxiomAssignment;
use crate::term::FTerm;

/// A parsed corpus file.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub axioms: AxiomAssignment,
    pub proof: CompactedDTerm,
    /// Labels marked with `*`, in file order.
    pub goals: Vec<PrimLabel>,
    /// Displayed formulas of derived steps.
    pub formulas: IndexMap<PrimLabel, FTerm>,
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s != "n" && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

pub fn parse_corpus(src: &str) -> Result<Corpus, ParseError> {
    let none = HashSet::new();
    let mut axioms = AxiomAssignment::new();
    let mut bindings: IndexMap<PrimLabel, DTerm> = IndexMap::new();
    let mut goals = Vec::new();
    let mut formulas = IndexMap::new();
    let mut defined: HashSet<PrimLabel> = HashSet::new();
    for (k, raw) in src.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (goal, rest) = match line.strip_prefix('*') {
            Some(r) => (true, r.trim_start()),
            None => (false, line),
        };
        let err = |col: usize, msg: &str| ParseError::Malformed {
            line: line_no,
            column: col,
            message: msg.to_string(),
        };
        let eq = rest.find('=');
        let colon = rest.find(':');
        match (eq, colon) {
            (Some(e), c) if c.is_none_or(|c| e < c) => {
                let label = rest[..e].trim().trim_end_matches('.');
                if !valid_label(label) {
                    return Err(err(0, &format!("invalid label `{label}`")));
                }
                let label = PrimLabel::new(label);
                let (dtext, ftext) = match c {
                    Some(c) => (&rest[e + 1..c], Some(&rest[c + 1..])),
                    None => (&rest[e + 1..], None),
                };
                let d = dnotation::parse(dtext.trim()).map_err(|e| e.at_line(line_no))?;
                if d.is_prim() {
                    return Err(err(e + 1, "a derived step must be a compound D-term"));
                }
                for p in d.prims() {
                    if !p.is_n() && !defined.contains(&p) {
                        return Err(ParseError::UndefinedLabel {
                            line: line_no,
                            label: p.to_string(),
                        });
                    }
                }
                if !defined.insert(label.clone()) {
                    return Err(ParseError::DuplicateLabel {
                        line: line_no,
                        label: label.to_string(),
                    });
                }
                if let Some(f) = ftext {
                    let f = polish::parse_polish(f.trim(), &none).map_err(|e| e.at_line(line_no))?;
                    formulas.insert(label.clone(), f);
                }
                if goal {
                    goals.push(label.clone());
                }
                bindings.insert(label, d);
            }
            (_, Some(c)) => {
                let label = rest[..c].trim().trim_end_matches('.');
                if !valid_label(label) {
                    return Err(err(0, &format!("invalid label `{label}`")));
                }
                let label = PrimLabel::new(label);
                let f = polish::parse_polish(rest[c + 1..].trim(), &none).map_err(|e| e.at_line(line_no))?;
                if !defined.insert(label.clone()) {
                    return Err(ParseError::DuplicateLabel {
                        line: line_no,
                        label: label.to_string(),
                    });
                }
                if goal {
                    goals.push(label.clone());
                }
                axioms.insert(label, &f);
            }
            _ => return Err(err(0, "expected `label = D-term` or `label : formula`")),
        }
    }
    let proof = CompactedDTerm::new(bindings).map_err(|e| match e {
        crate::Error::CyclicLabels(l) => ParseError::CyclicLabels(l),
        other => ParseError::malformed(0, other.to_string()),
    })?;
    Ok(Corpus {
        axioms,
        proof,
        goals,
        formulas,
    })
}

/// Canonical printing; `parse_corpus(print_corpus(c))` reproduces `c`.
pub fn print_corpus(c: &Corpus) -> String {
    let mut out = String::new();
    let goals: HashSet<&PrimLabel> = c.goals.iter().collect();
    for l in c.axioms.labels() {
        if goals.contains(l) {
            out.push_str("* ");
        }
        out.push_str(&format!(
            "{l} : {}\n",
            polish::print_polish(c.axioms.formula(l).expect("axiom"))
        ));
    }
    for (l, d) in c.proof.bindings() {
        if goals.contains(l) {
            out.push_str("* ");
        }
        out.push_str(&format!("{l} = {}", dnotation::print(d)));
        if let Some(f) = c.formulas.get(l) {
            out.push_str(&format!(" : {}", polish::print_polish(f)));
        }
        out.push('\n');
    }
    out
}
