//! JSON interchange for compacted proofs.
//!
//! ```json
//! {"axioms": {"1": "CCCpqrCCrpCsp"},
//!  "steps": [{"label": "2", "d": ["1", "1"]}, {"label": "3", "d": "D12"}],
//!  "roots": ["3"]}
//! ```
//!
//! A step's `d` is either a D-notation string or nested `[major, minor]`
//! arrays with label strings at the leaves.

use std::collections::HashSet;

use indexmap::IndexMap;
use serde_json::{json, Value};

use crate::compacted::CompactedDTerm;
use crate::dterm::{DTerm, PrimLabel};
use crate::error::ParseError;
use crate::formats::{dnotation, polish};
use crate::semantics::AxiomAssignment;

/// A proof read from JSON.
#[derive(Clone, Debug)]
pub struct JsonProof {
    pub axioms: AxiomAssignment,
    pub proof: CompactedDTerm,
    /// Declared roots; empty if the document has none.
    pub roots: Vec<PrimLabel>,
}

fn bad(msg: impl Into<String>) -> ParseError {
    ParseError::malformed(0, msg)
}

fn dterm_from_value(v: &Value) -> Result<DTerm, ParseError> {
    match v {
        Value::String(s) => dnotation::parse(s),
        Value::Number(n) => Ok(DTerm::prim(PrimLabel::new(&n.to_string()))),
        Value::Array(a) if a.len() == 2 => Ok(DTerm::d(&dterm_from_value(&a[0])?, &dterm_from_value(&a[1])?)),
        other => Err(bad(format!("expected a D-term, got {other}"))),
    }
}

fn dterm_to_value(d: &DTerm) -> Value {
    match d.children() {
        None => Value::String(d.as_prim().expect("prim").to_string()),
        Some((a, b)) => json!([dterm_to_value(a), dterm_to_value(b)]),
    }
}

pub fn proof_from_json(src: &str) -> Result<JsonProof, ParseError> {
    let v: Value = serde_json::from_str(src).map_err(|e| ParseError::Malformed {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let none = HashSet::new();
    let mut axioms = AxiomAssignment::new();
    if let Some(ax) = v.get("axioms") {
        let ax = ax.as_object().ok_or_else(|| bad("`axioms` must be an object"))?;
        for (l, f) in ax {
            let f = f.as_str().ok_or_else(|| bad("axiom formulas must be strings"))?;
            axioms.insert(PrimLabel::new(l), &polish::parse_formula(f, &none)?);
        }
    }
    let mut bindings: IndexMap<PrimLabel, DTerm> = IndexMap::new();
    let steps = v.get("steps").and_then(Value::as_array).ok_or_else(|| bad("missing `steps` array"))?;
    for (k, s) in steps.iter().enumerate() {
        let label = s
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| bad(format!("step {k} has no label")))?;
        let d = dterm_from_value(s.get("d").ok_or_else(|| bad(format!("step {k} has no `d`")))?)?;
        if bindings.insert(PrimLabel::new(label), d).is_some() {
            return Err(ParseError::DuplicateLabel {
                line: 0,
                label: label.to_string(),
            });
        }
    }
    for d in bindings.values() {
        for p in d.prims() {
            if !p.is_n() && !bindings.contains_key(&p) && !axioms.contains(&p) && !axioms.is_empty() {
                return Err(ParseError::UndefinedLabel {
                    line: 0,
                    label: p.to_string(),
                });
            }
        }
    }
    let proof = CompactedDTerm::new(bindings).map_err(|e| match e {
        crate::Error::CyclicLabels(l) => ParseError::CyclicLabels(l),
        other => bad(other.to_string()),
    })?;
    let roots = match v.get("roots") {
        None => Vec::new(),
        Some(r) => r
            .as_array()
            .ok_or_else(|| bad("`roots` must be an array"))?
            .iter()
            .map(|x| x.as_str().map(PrimLabel::new).ok_or_else(|| bad("roots must be strings")))
            .collect::<Result<_, _>>()?,
    };
    Ok(JsonProof { axioms, proof, roots })
}

/// Serialize with nested-array D-terms.
pub fn proof_to_json(axioms: &AxiomAssignment, proof: &CompactedDTerm, roots: &[PrimLabel]) -> Value {
    let ax: serde_json::Map<String, Value> = axioms
        .labels()
        .map(|l| (l.to_string(), Value::String(polish::print_polish(axioms.formula(l).expect("axiom")))))
        .collect();
    let steps: Vec<Value> = proof
        .bindings()
        .iter()
        .map(|(l, d)| json!({"label": l.to_string(), "d": dterm_to_value(d)}))
        .collect();
    let roots: Vec<Value> = roots.iter().map(|r| Value::String(r.to_string())).collect();
    json!({"axioms": ax, "steps": steps, "roots": roots})
}
