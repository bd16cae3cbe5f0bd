//! Compacted D-terms: label bindings that share subproofs, i.e. DAG proofs.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use serde::Serialize;

use crate::dterm::{DTerm, PrimLabel};
use crate::error::{Error, Result};

/// A finite mapping from labels to compound D-terms whose leaves may be other
/// labels. Roots that are primitive or repeat another root are kept as aliases.
#[derive(Clone, Debug, Default)]
pub struct CompactedDTerm {
    bindings: IndexMap<PrimLabel, DTerm>,
    aliases: IndexMap<PrimLabel, PrimLabel>,
}

/// Statistics of the DAG represented by a compacted D-term.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DagStats {
    /// Inner nodes of the DAG, the sum of the tree sizes of all bindings.
    pub inner_nodes: u64,
    /// Incoming edges per label (bound labels and primitive leaves).
    pub in_degree: IndexMap<PrimLabel, u64>,
    /// Occurrences per label in the expanded root trees.
    pub occurrences: IndexMap<PrimLabel, u64>,
    /// Leaves of the expanded root trees that are not `n`.
    pub primitive_leaves: u64,
    /// `n` leaves of the expanded root trees.
    pub n_leaves: u64,
}

/// Leaf occurrence counts of the tree form of `t`, computed on its DAG.
pub(crate) fn leaf_multiplicities(t: &DTerm) -> IndexMap<PrimLabel, u64> {
    let nodes = t.subterms();
    let mut mult: HashMap<usize, u64> = HashMap::new();
    mult.insert(t.id(), 1);
    let mut out = IndexMap::new();
    // Reverse post-order visits parents before children.
    for n in nodes.iter().rev() {
        let m = mult.get(&n.id()).copied().unwrap_or(0);
        match n.children() {
            Some((a, b)) => {
                *mult.entry(a.id()).or_insert(0) += m;
                *mult.entry(b.id()).or_insert(0) += m;
            }
            None => {
                *out.entry(n.as_prim().expect("leaf").clone()).or_insert(0) += m;
            }
        }
    }
    out.sort_keys();
    out
}

impl CompactedDTerm {
    /// Build and validate: ranges must be compound and labels acyclic.
    pub fn new(bindings: impl IntoIterator<Item = (PrimLabel, DTerm)>) -> Result<Self> {
        Self::with_aliases(bindings, std::iter::empty())
    }

    pub fn with_aliases(
        bindings: impl IntoIterator<Item = (PrimLabel, DTerm)>,
        aliases: impl IntoIterator<Item = (PrimLabel, PrimLabel)>,
    ) -> Result<Self> {
        let mut b = IndexMap::new();
        for (l, d) in bindings {
            if d.is_prim() {
                return Err(Error::PrimitiveBinding(l.to_string()));
            }
            if l.is_n() {
                return Err(Error::InvalidProblem("`n` cannot be bound".into()));
            }
            b.insert(l, d);
        }
        let c = CompactedDTerm {
            bindings: b,
            aliases: aliases.into_iter().collect(),
        };
        c.topological_order()?;
        Ok(c)
    }

    pub fn bindings(&self) -> &IndexMap<PrimLabel, DTerm> {
        &self.bindings
    }

    pub fn aliases(&self) -> &IndexMap<PrimLabel, PrimLabel> {
        &self.aliases
    }

    pub fn get(&self, l: &PrimLabel) -> Option<&DTerm> {
        self.bindings.get(l)
    }

    pub fn is_bound(&self, l: &PrimLabel) -> bool {
        self.bindings.contains_key(l) || self.aliases.contains_key(l)
    }

    /// Labels in binding order, then aliases.
    pub fn labels(&self) -> Vec<PrimLabel> {
        self.bindings.keys().chain(self.aliases.keys()).cloned().collect()
    }

    /// Primitive labels used as leaves that are not bound: the axioms and `n`.
    pub fn axiom_labels(&self) -> Vec<PrimLabel> {
        let mut set: Vec<PrimLabel> = self
            .bindings
            .values()
            .flat_map(|d| d.prims())
            .chain(self.aliases.values().cloned())
            .filter(|l| !self.is_bound(l))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        set.sort();
        set
    }

    /// Labels that no other binding refers to, in binding order.
    pub fn roots(&self) -> Vec<PrimLabel> {
        let used: HashSet<PrimLabel> = self
            .bindings
            .values()
            .flat_map(|d| d.prims())
            .chain(self.aliases.values().cloned())
            .collect();
        self.labels().into_iter().filter(|l| !used.contains(l)).collect()
    }

    /// Bound labels ordered so that every label follows the labels it uses.
    pub fn topological_order(&self) -> Result<Vec<PrimLabel>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: HashMap<PrimLabel, Mark> = HashMap::new();
        let mut order = Vec::new();
        for root in self.labels() {
            if marks.contains_key(&root) {
                continue;
            }
            // Iterative DFS: (label, deps, next index)
            let mut stack: Vec<(PrimLabel, Vec<PrimLabel>, usize)> = Vec::new();
            marks.insert(root.clone(), Mark::Active);
            stack.push((root.clone(), self.deps(&root), 0));
            while let Some((l, deps, i)) = stack.last_mut() {
                if *i < deps.len() {
                    let dep = deps[*i].clone();
                    *i += 1;
                    if !self.is_bound(&dep) {
                        continue;
                    }
                    match marks.get(&dep) {
                        Some(Mark::Active) => return Err(Error::CyclicLabels(dep.to_string())),
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(dep.clone(), Mark::Active);
                            let d = self.deps(&dep);
                            stack.push((dep, d, 0));
                        }
                    }
                } else {
                    marks.insert(l.clone(), Mark::Done);
                    order.push(l.clone());
                    stack.pop();
                }
            }
        }
        Ok(order)
    }

    fn deps(&self, l: &PrimLabel) -> Vec<PrimLabel> {
        if let Some(d) = self.bindings.get(l) {
            d.prims()
        } else if let Some(t) = self.aliases.get(l) {
            vec![t.clone()]
        } else {
            Vec::new()
        }
    }

    /// Expansions of all bound labels.
    pub fn expand_all(&self) -> Result<IndexMap<PrimLabel, DTerm>> {
        let mut out: IndexMap<PrimLabel, DTerm> = IndexMap::new();
        for l in self.topological_order()? {
            let d = if let Some(d) = self.bindings.get(&l) {
                d.substitute_prims(&|p| out.get(p).cloned())
            } else {
                let t = &self.aliases[&l];
                out.get(t).cloned().unwrap_or_else(|| DTerm::prim(t.clone()))
            };
            out.insert(l, d);
        }
        Ok(out)
    }

    /// The D-term denoted by label `l`.
    pub fn expand(&self, l: &PrimLabel) -> Result<DTerm> {
        if !self.is_bound(l) {
            return Err(Error::UnknownLabel(l.to_string()));
        }
        let all = self.expand_all()?;
        Ok(all[l].clone())
    }

    /// Expanded root D-terms, by root label.
    pub fn expanded_roots(&self) -> Result<Vec<(PrimLabel, DTerm)>> {
        let all = self.expand_all()?;
        Ok(self.roots().into_iter().map(|l| (l.clone(), all[&l].clone())).collect())
    }

    pub fn dag_stats(&self) -> Result<DagStats> {
        let order = self.topological_order()?;
        let mut in_degree: IndexMap<PrimLabel, u64> = IndexMap::new();
        let mut mults: HashMap<PrimLabel, IndexMap<PrimLabel, u64>> = HashMap::new();
        let mut inner = 0u64;
        for l in &order {
            in_degree.entry(l.clone()).or_insert(0);
            let m = match self.bindings.get(l) {
                Some(d) => {
                    inner += d.t_size();
                    leaf_multiplicities(d)
                }
                None => std::iter::once((self.aliases[l].clone(), 1)).collect(),
            };
            if self.bindings.contains_key(l) {
                for (c, k) in &m {
                    *in_degree.entry(c.clone()).or_insert(0) += k;
                }
            }
            mults.insert(l.clone(), m);
        }
        let mut occ: IndexMap<PrimLabel, u64> = IndexMap::new();
        for r in self.roots() {
            occ.insert(r, 1);
        }
        for l in order.iter().rev() {
            let k = occ.get(l).copied().unwrap_or(0);
            occ.entry(l.clone()).or_insert(0);
            for (c, m) in &mults[l] {
                let e = occ.entry(c.clone()).or_insert(0);
                *e = e.saturating_add(k.saturating_mul(*m));
            }
        }
        let mut primitive_leaves = 0u64;
        let mut n_leaves = 0u64;
        for (l, k) in &occ {
            if !self.is_bound(l) {
                if l.is_n() {
                    n_leaves += k;
                } else {
                    primitive_leaves += k;
                }
            }
        }
        Ok(DagStats {
            inner_nodes: inner,
            in_degree,
            occurrences: occ,
            primitive_leaves,
            n_leaves,
        })
    }
}

/// Minimal DAG for a set of labelled root D-terms, with fresh labels `L1, L2, ...`
/// for shared subterms in post-order of first visit.
pub fn compact(roots: &[(PrimLabel, DTerm)]) -> CompactedDTerm {
    let taken: HashSet<PrimLabel> = roots
        .iter()
        .flat_map(|(l, d)| std::iter::once(l.clone()).chain(d.prims()))
        .collect();
    let mut k = 0;
    compact_with(roots, &mut || loop {
        k += 1;
        let l = PrimLabel::new(&format!("L{k}"));
        if !taken.contains(&l) {
            return l;
        }
    })
}

/// As [`compact`], with numeric fresh labels counting up from `start` and
/// skipping labels already in use.
pub fn compact_numbered(roots: &[(PrimLabel, DTerm)], start: u64) -> CompactedDTerm {
    let taken: HashSet<PrimLabel> = roots
        .iter()
        .flat_map(|(l, d)| std::iter::once(l.clone()).chain(d.prims()))
        .collect();
    let mut k = start;
    compact_with(roots, &mut || loop {
        let l = PrimLabel::new(&k.to_string());
        k += 1;
        if !taken.contains(&l) {
            return l;
        }
    })
}

pub fn compact_with(roots: &[(PrimLabel, DTerm)], fresh: &mut dyn FnMut() -> PrimLabel) -> CompactedDTerm {
    let mut order: Vec<DTerm> = Vec::new();
    let mut seen: HashSet<DTerm> = HashSet::new();
    let mut indeg: HashMap<DTerm, usize> = HashMap::new();
    for (_, r) in roots {
        for t in r.subterms() {
            if t.is_compound() && seen.insert(t.clone()) {
                let (a, b) = t.children().expect("compound");
                for c in [a, b] {
                    if c.is_compound() {
                        *indeg.entry(c.clone()).or_insert(0) += 1;
                    }
                }
                order.push(t);
            }
        }
    }
    let mut label_of: HashMap<DTerm, PrimLabel> = HashMap::new();
    let mut aliases = IndexMap::new();
    for (l, r) in roots {
        if r.is_prim() {
            aliases.insert(l.clone(), r.as_prim().expect("prim").clone());
        } else if let Some(first) = label_of.get(r) {
            aliases.insert(l.clone(), first.clone());
        } else {
            label_of.insert(r.clone(), l.clone());
        }
    }
    for t in &order {
        if !label_of.contains_key(t) && indeg.get(t).copied().unwrap_or(0) > 1 {
            label_of.insert(t.clone(), fresh());
        }
    }
    let mut bindings = IndexMap::new();
    for t in &order {
        if let Some(l) = label_of.get(t) {
            bindings.insert(l.clone(), fold_labels(t, &label_of, true));
        }
    }
    CompactedDTerm { bindings, aliases }
}

fn fold_labels(t: &DTerm, label_of: &HashMap<DTerm, PrimLabel>, top: bool) -> DTerm {
    if !top {
        if let Some(l) = label_of.get(t) {
            return DTerm::prim(l.clone());
        }
    }
    match t.children() {
        Some((a, b)) => DTerm::d(&fold_labels(a, label_of, false), &fold_labels(b, label_of, false)),
        None => t.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::dnotation::parse;

    fn l(s: &str) -> PrimLabel {
        PrimLabel::new(s)
    }

    #[test]
    fn compacts_shared_subterms() {
        let d = parse("DD11DD1D11D1D11").unwrap();
        let c = compact_numbered(&[(l("4"), d.clone())], 2);
        let shown: Vec<String> = c.bindings().iter().map(|(k, v)| format!("{k}={v}")).collect();
        assert_eq!(shown, ["2=D11", "3=D12", "4=D2D33"]);
        assert_eq!(c.expand(&l("4")).unwrap(), d);
        assert_eq!(c.roots(), vec![l("4")]);
        assert_eq!(c.dag_stats().unwrap().inner_nodes, d.c_size() as u64);
    }

    #[test]
    fn rejects_cycles_and_unknown_labels() {
        let err = CompactedDTerm::new([(l("2"), parse("D13").unwrap()), (l("3"), parse("D12").unwrap())]);
        assert!(matches!(err, Err(Error::CyclicLabels(_))));
        let c = CompactedDTerm::new([(l("2"), parse("D11").unwrap())]).unwrap();
        assert!(matches!(c.expand(&l("9")), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn dag_stats_counts() {
        let c = CompactedDTerm::new([(l("root"), parse("D11").unwrap())]).unwrap();
        let s = c.dag_stats().unwrap();
        assert_eq!(s.inner_nodes, 1);
        assert_eq!(s.occurrences[&l("root")], 1);
        assert_eq!(s.primitive_leaves, 2);
        assert_eq!(s.in_degree[&l("1")], 2);
    }
}
