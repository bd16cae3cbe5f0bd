//! Proof semantics of D-terms: axiom assignments, pairings, in-place theorems
//! and most general theorems.
//!
//! A theorem is represented by the argument `t` of the atom `P(t)`. Most
//! general theorems are returned with canonically renamed variables.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use crate::compacted::CompactedDTerm;
use crate::dterm::{DTerm, PrimLabel};
use crate::error::{Error, Result};
use crate::term::{subsumes, FTerm, Position, Unifier, Var};

/// Maps primitive D-terms to axioms. Each axiom is stored over the variables
/// `x_ε^1, x_ε^2, ...` and in canonical form.
#[derive(Clone, Debug, Default)]
pub struct AxiomAssignment {
    axioms: IndexMap<PrimLabel, (FTerm, FTerm)>,
}

impl AxiomAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assign `formula` to the label `1`.
    pub fn single(formula: &FTerm) -> Self {
        let mut a = Self::new();
        a.insert(PrimLabel::new("1"), formula);
        a
    }

    pub fn insert(&mut self, label: PrimLabel, formula: &FTerm) {
        let canonical = formula.canonical();
        let positional = canonical.map_vars(&|v| match v {
            Var::Num(k) => Some(FTerm::var(Var::X(Position::root(), *k))),
            _ => None,
        });
        self.axioms.insert(label, (positional, canonical));
    }

    /// The axiom over the variables `x_ε^i`.
    pub fn get(&self, label: &PrimLabel) -> Option<&FTerm> {
        self.axioms.get(label).map(|a| &a.0)
    }

    /// The axiom with canonical variables.
    pub fn formula(&self, label: &PrimLabel) -> Option<&FTerm> {
        self.axioms.get(label).map(|a| &a.1)
    }

    pub fn labels(&self) -> impl Iterator<Item = &PrimLabel> {
        self.axioms.keys()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn contains(&self, label: &PrimLabel) -> bool {
        self.axioms.contains_key(label)
    }

    /// The first axiom label, used to stand in for `n` where needed.
    pub fn first_label(&self) -> Option<&PrimLabel> {
        self.axioms.keys().next()
    }
}

/// A CD problem: axioms and an optional ground goal.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub axioms: AxiomAssignment,
    pub goal: Option<FTerm>,
}

impl Problem {
    pub fn new(name: impl Into<String>, axioms: AxiomAssignment, goal: Option<FTerm>) -> Result<Self> {
        if let Some(g) = &goal {
            if !g.is_ground() {
                return Err(Error::InvalidProblem(format!("goal {g} is not ground")));
            }
        }
        Ok(Problem {
            name: name.into(),
            axioms,
            goal,
        })
    }
}

/// Replace each variable of a formula by a constant named after it, giving a
/// ground goal.
pub fn skolemize(t: &FTerm) -> FTerm {
    t.map_vars(&|v| Some(FTerm::constant(&format!("sk_{v}"))))
}

/// `shift(s, p)`: prefix the position of every positional variable with `p`.
pub fn shift(s: &FTerm, p: &Position) -> Result<FTerm> {
    let bad = s.vars().into_iter().find(|v| !v.is_positional());
    if let Some(v) = bad {
        return Err(Error::NonPositionalVariable(v.to_string()));
    }
    if p.is_root() {
        return Ok(s.clone());
    }
    Ok(s.map_vars(&|v| match v {
        Var::Y(q) => Some(FTerm::var(Var::Y(p.concat(q)))),
        Var::X(q, i) => Some(FTerm::var(Var::X(p.concat(q), *i))),
        _ => None,
    }))
}

/// One pairing of the proof structure, tagged with the position it comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub position: Position,
    pub left: FTerm,
    pub right: FTerm,
}

fn y(p: &Position) -> FTerm {
    FTerm::var(Var::Y(p.clone()))
}

/// Pairings of `d` under `alpha`. A leaf `n` at `p` is paired with the fresh
/// variable `x_p^0`, so it constrains nothing.
pub fn pairings(d: &DTerm, alpha: &AxiomAssignment) -> Result<Vec<Pairing>> {
    let mut out = Vec::new();
    for (p, e) in d.positioned_subterms() {
        match e.as_prim() {
            Some(l) if l.is_n() => out.push(Pairing {
                left: y(&p),
                right: FTerm::var(Var::X(p.clone(), 0)),
                position: p,
            }),
            Some(l) => {
                let ax = alpha.get(l).ok_or_else(|| Error::MissingAxiom(l.to_string()))?;
                out.push(Pairing {
                    left: y(&p),
                    right: shift(ax, &p)?,
                    position: p,
                });
            }
            None => out.push(Pairing {
                left: y(&p.child(1)),
                right: FTerm::imp(y(&p.child(2)), y(&p)),
                position: p,
            }),
        }
    }
    Ok(out)
}

/// In-place theorems of all positions of a D-term, from one global unifier.
pub struct IptTable {
    ipts: IndexMap<Position, FTerm>,
}

impl IptTable {
    /// Returns `None` if the pairings are not unifiable.
    pub fn new(d: &DTerm, alpha: &AxiomAssignment) -> Result<Option<IptTable>> {
        let ps = pairings(d, alpha)?;
        let mut u = Unifier::new();
        for p in &ps {
            if u.unify(&p.left, &p.right).is_err() {
                return Ok(None);
            }
        }
        let mut ipts = IndexMap::new();
        for p in d.positions() {
            let t = u.resolve(&y(&p));
            ipts.insert(p, t);
        }
        Ok(Some(IptTable { ipts }))
    }

    pub fn get(&self, p: &Position) -> Option<&FTerm> {
        self.ipts.get(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Position, &FTerm)> {
        self.ipts.iter()
    }

    /// The most general theorem of the whole D-term.
    pub fn root(&self) -> FTerm {
        self.ipts[&Position::root()].canonical()
    }
}

/// `Ipt(d, p)`; `None` when undefined.
pub fn ipt(d: &DTerm, p: &Position, alpha: &AxiomAssignment) -> Result<Option<FTerm>> {
    d.subterm_at(p)?;
    Ok(IptTable::new(d, alpha)?.map(|t| t.get(p).expect("position").clone()))
}

/// `Mgt(d)` computed from the global unifier of all pairings.
pub fn mgt_global(d: &DTerm, alpha: &AxiomAssignment) -> Result<Option<FTerm>> {
    Ok(IptTable::new(d, alpha)?.map(|t| t.root()))
}

/// The conclusion of detaching `minor` from `major`: `zσ` where `σ` unifies
/// `major` with `i(minor, z)` after renaming apart. Inputs and output are
/// canonical.
pub fn detach(major: &FTerm, minor: &FTerm) -> Option<FTerm> {
    let k = major.max_num();
    let minor = minor.shift_nums(k);
    let z = FTerm::num(k + minor.max_num().max(k) + 1);
    let mut u = Unifier::new();
    u.unify(major, &FTerm::imp(minor, z.clone())).ok()?;
    Some(u.resolve(&z).canonical())
}

/// Whether the conclusion of `major` does not depend on its minor premise:
/// the formula is a variable or `i(x, t)` with `x` a variable not in `t`.
pub fn admits_n(major: &FTerm) -> bool {
    if major.is_var() {
        return true;
    }
    match major.as_imp() {
        Some((x, t)) => x.as_var().is_some_and(|v| !t.contains_var(v)),
        None => false,
    }
}

/// Memoized bottom-up computation of most general theorems.
///
/// Leaves are looked up in a table of canonical formulas; `n` is a fresh
/// variable.
pub struct MgtCache {
    leaves: HashMap<PrimLabel, Option<FTerm>>,
    memo: HashMap<DTerm, Option<FTerm>>,
}

impl MgtCache {
    pub fn new(alpha: &AxiomAssignment) -> Self {
        let leaves = alpha
            .labels()
            .map(|l| (l.clone(), alpha.formula(l).cloned()))
            .collect();
        MgtCache {
            leaves,
            memo: HashMap::new(),
        }
    }

    /// Treat `label` as a leaf with the given theorem (`None` if undefined).
    pub fn set_leaf(&mut self, label: PrimLabel, theorem: Option<FTerm>) {
        self.leaves.insert(label, theorem.map(|t| t.canonical()));
        self.memo.clear();
    }

    pub fn mgt(&mut self, d: &DTerm) -> Result<Option<FTerm>> {
        if let Some(l) = d.as_prim() {
            if l.is_n() {
                return Ok(Some(FTerm::num(1)));
            }
            return self
                .leaves
                .get(l)
                .cloned()
                .ok_or_else(|| Error::MissingAxiom(l.to_string()));
        }
        if let Some(m) = self.memo.get(d) {
            return Ok(m.clone());
        }
        // Post-order over the DAG so recursion depth stays bounded.
        for t in d.subterms() {
            if t.is_prim() || self.memo.contains_key(&t) {
                continue;
            }
            let (a, b) = t.children().expect("compound");
            let ma = self.mgt(a)?;
            let mb = self.mgt(b)?;
            let r = match (ma, mb) {
                (Some(ma), Some(mb)) => detach(&ma, &mb),
                _ => None,
            };
            self.memo.insert(t, r);
        }
        Ok(self.memo[d].clone())
    }

    /// Insert a known result, e.g. one computed elsewhere.
    pub fn remember(&mut self, d: DTerm, theorem: Option<FTerm>) {
        self.memo.insert(d, theorem);
    }

    pub fn cached(&self, d: &DTerm) -> Option<&Option<FTerm>> {
        self.memo.get(d)
    }
}

/// `Mgt(d)` computed bottom-up; `None` when undefined.
pub fn mgt(d: &DTerm, alpha: &AxiomAssignment) -> Result<Option<FTerm>> {
    MgtCache::new(alpha).mgt(d)
}

/// How to obtain the theorem of a label of a compacted D-term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MgtRoute {
    /// Expand the label to a D-term first.
    #[default]
    Expand,
    /// Use the theorems of used labels as if they were axioms.
    Lemmas,
}

/// The most general theorem of label `l` of `delta`.
pub fn mgt_of_compacted(
    delta: &CompactedDTerm,
    l: &PrimLabel,
    alpha: &AxiomAssignment,
    route: MgtRoute,
) -> Result<Option<FTerm>> {
    match route {
        MgtRoute::Expand => mgt(&delta.expand(l)?, alpha),
        MgtRoute::Lemmas => Ok(lemma_mgts(delta, alpha)?
            .get(l)
            .cloned()
            .ok_or_else(|| Error::UnknownLabel(l.to_string()))?),
    }
}

/// Theorems of all labels via the lemma route.
pub fn lemma_mgts(delta: &CompactedDTerm, alpha: &AxiomAssignment) -> Result<IndexMap<PrimLabel, Option<FTerm>>> {
    let mut cache = MgtCache::new(alpha);
    let mut out = IndexMap::new();
    for l in delta.topological_order()? {
        let m = match delta.get(&l) {
            Some(d) => cache.mgt(d)?,
            None => {
                let target = &delta.aliases()[&l];
                cache.mgt(&DTerm::prim(target.clone()))?
            }
        };
        cache.set_leaf(l.clone(), m.clone());
        out.insert(l, m);
    }
    Ok(out)
}

/// Position of the first invalid use of `n`: a `D(d1, n)` whose major premise
/// does not justify `n`, an `n` as major premise, or `n` as the whole D-term.
pub fn invalid_n_use(d: &DTerm, alpha: &AxiomAssignment) -> Result<Option<Position>> {
    if d.is_n() {
        return Ok(Some(Position::root()));
    }
    let mut cache = MgtCache::new(alpha);
    let mut checked: HashSet<DTerm> = HashSet::new();
    for (p, e) in d.positioned_subterms() {
        let Some((a, b)) = e.children() else { continue };
        if a.is_n() {
            return Ok(Some(p.child(1)));
        }
        if !b.is_n() || !checked.insert(e.clone()) {
            continue;
        }
        match cache.mgt(a)? {
            Some(m) if admits_n(&m) => {}
            _ => return Ok(Some(p)),
        }
    }
    Ok(None)
}

/// Verdict for one root of a proof.
#[derive(Clone, Debug)]
pub struct RootVerdict {
    pub label: PrimLabel,
    /// `None` if the most general theorem is undefined.
    pub mgt: Option<FTerm>,
    /// Whether the theorem subsumes the goal; `None` for goal-free problems.
    pub proves_goal: Option<bool>,
}

/// Check every root of `delta` against the problem.
pub fn check_proof(delta: &CompactedDTerm, problem: &Problem) -> Result<Vec<RootVerdict>> {
    let mut cache = MgtCache::new(&problem.axioms);
    let mut out = Vec::new();
    for (label, d) in delta.expanded_roots()? {
        if let Some(p) = invalid_n_use(&d, &problem.axioms)? {
            return Err(Error::InvalidNUse(p));
        }
        let m = cache.mgt(&d)?;
        let proves_goal = problem
            .goal
            .as_ref()
            .map(|g| m.as_ref().is_some_and(|m| subsumes(m, g)));
        out.push(RootVerdict {
            label,
            mgt: m,
            proves_goal,
        });
    }
    Ok(out)
}
