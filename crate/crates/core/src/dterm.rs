//! D-terms: full binary trees over primitive labels that record the structure
//! of condensed detachment proofs.
//!
//! D-terms are hash-consed, so structurally equal D-terms share one node and
//! equality is pointer equality. A D-term is a DAG in memory and all
//! structural measures are computed on the DAG.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, Weak};

use dashmap::mapref::entry::Entry;
use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::Position;

/// Label of a primitive D-term. `n` is reserved for the "any axiom" leaf.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrimLabel(Arc<str>);

impl PrimLabel {
    pub fn new(s: &str) -> PrimLabel {
        PrimLabel(Arc::from(s))
    }

    pub fn n() -> PrimLabel {
        PrimLabel::new("n")
    }

    pub fn is_n(&self) -> bool {
        &*self.0 == "n"
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_number(&self) -> Option<u64> {
        if self.0.bytes().all(|b| b.is_ascii_digit()) {
            self.0.parse().ok()
        } else {
            None
        }
    }
}

impl From<&str> for PrimLabel {
    fn from(s: &str) -> Self {
        PrimLabel::new(s)
    }
}

impl From<u32> for PrimLabel {
    fn from(k: u32) -> Self {
        PrimLabel::new(&k.to_string())
    }
}

/// Numerals sort numerically and before other labels.
impl Ord for PrimLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.as_number(), other.as_number()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for PrimLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PrimLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for PrimLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for PrimLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for PrimLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(PrimLabel::new(&s))
    }
}

pub enum DKind {
    Prim(PrimLabel),
    D(DTerm, DTerm),
}

struct DNode {
    kind: DKind,
    hash: u64,
    t_size: u64,
    height: u32,
}

#[derive(PartialEq, Eq, Hash)]
enum Key {
    Prim(Arc<str>),
    D(usize, usize),
}

impl DNode {
    fn key(&self) -> Key {
        match &self.kind {
            DKind::Prim(l) => Key::Prim(l.0.clone()),
            DKind::D(a, b) => Key::D(a.addr(), b.addr()),
        }
    }
}

fn interner() -> &'static DashMap<Key, Weak<DNode>> {
    static INTERNER: OnceLock<DashMap<Key, Weak<DNode>>> = OnceLock::new();
    INTERNER.get_or_init(DashMap::new)
}

impl Drop for DNode {
    fn drop(&mut self) {
        let key = self.key();
        // The removed Weak is dropped after the shard lock is released.
        let _removed = interner().remove_if(&key, |_, w| w.strong_count() == 0);
    }
}

fn intern(key: Key, make: impl FnOnce() -> DNode) -> DTerm {
    let map = interner();
    if let Some(w) = map.get(&key) {
        if let Some(a) = w.upgrade() {
            return DTerm(a);
        }
    }
    match map.entry(key) {
        Entry::Occupied(mut e) => {
            if let Some(a) = e.get().upgrade() {
                DTerm(a)
            } else {
                let a = Arc::new(make());
                e.insert(Arc::downgrade(&a));
                DTerm(a)
            }
        }
        Entry::Vacant(e) => {
            let a = Arc::new(make());
            e.insert(Arc::downgrade(&a));
            DTerm(a)
        }
    }
}

fn mix(a: u64, b: u64) -> u64 {
    (a.rotate_left(7) ^ b).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// A hash-consed D-term.
#[derive(Clone)]
pub struct DTerm(Arc<DNode>);

impl DTerm {
    pub fn prim(label: impl Into<PrimLabel>) -> DTerm {
        let label = label.into();
        intern(Key::Prim(label.0.clone()), || {
            let mut h = std::collections::hash_map::DefaultHasher::new();
            label.0.hash(&mut h);
            DNode {
                hash: mix(11, h.finish()),
                kind: DKind::Prim(label),
                t_size: 0,
                height: 0,
            }
        })
    }

    /// The special leaf `n`.
    pub fn n() -> DTerm {
        DTerm::prim(PrimLabel::n())
    }

    /// `D(major, minor)`
    pub fn d(major: &DTerm, minor: &DTerm) -> DTerm {
        intern(Key::D(major.addr(), minor.addr()), || DNode {
            hash: mix(mix(13, major.0.hash), minor.0.hash),
            t_size: 1 + major.0.t_size + minor.0.t_size,
            height: 1 + major.0.height.max(minor.0.height),
            kind: DKind::D(major.clone(), minor.clone()),
        })
    }

    fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Stable identity of this node while it is alive.
    pub fn id(&self) -> usize {
        self.addr()
    }

    pub fn kind(&self) -> &DKind {
        &self.0.kind
    }

    pub fn is_prim(&self) -> bool {
        matches!(self.0.kind, DKind::Prim(_))
    }

    pub fn is_compound(&self) -> bool {
        !self.is_prim()
    }

    pub fn is_n(&self) -> bool {
        matches!(&self.0.kind, DKind::Prim(l) if l.is_n())
    }

    pub fn as_prim(&self) -> Option<&PrimLabel> {
        match &self.0.kind {
            DKind::Prim(l) => Some(l),
            DKind::D(..) => None,
        }
    }

    pub fn children(&self) -> Option<(&DTerm, &DTerm)> {
        match &self.0.kind {
            DKind::D(a, b) => Some((a, b)),
            DKind::Prim(_) => None,
        }
    }

    pub fn major(&self) -> Option<&DTerm> {
        self.children().map(|c| c.0)
    }

    pub fn minor(&self) -> Option<&DTerm> {
        self.children().map(|c| c.1)
    }

    /// Number of inner nodes of the tree.
    pub fn t_size(&self) -> u64 {
        self.0.t_size
    }

    /// Edges on the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        self.0.height
    }

    /// Distinct subterms (including primitive ones and `self`) in post-order
    /// of first visit, major premise first.
    pub fn subterms(&self) -> Vec<DTerm> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        // Explicit stack: (node, children_pushed)
        let mut stack = vec![(self.clone(), false)];
        while let Some((t, expanded)) = stack.pop() {
            if seen.contains(&t.addr()) {
                continue;
            }
            match (&t.0.kind, expanded) {
                (DKind::D(a, b), false) => {
                    stack.push((t.clone(), true));
                    stack.push((b.clone(), false));
                    stack.push((a.clone(), false));
                }
                _ => {
                    seen.insert(t.addr());
                    out.push(t);
                }
            }
        }
        out
    }

    /// Subeq(d): distinct compound subterms, including `self` if compound.
    pub fn compound_subterms(&self) -> Vec<DTerm> {
        self.subterms().into_iter().filter(DTerm::is_compound).collect()
    }

    /// Sub(d): distinct strict compound subterms.
    pub fn strict_compound_subterms(&self) -> Vec<DTerm> {
        let mut v = self.compound_subterms();
        if self.is_compound() {
            v.pop();
        }
        v
    }

    /// Distinct strict subterms, primitive ones included.
    pub fn strict_subterms(&self) -> Vec<DTerm> {
        let mut v = self.subterms();
        v.pop();
        v
    }

    /// DPrim(d): primitive labels occurring in `self`, sorted.
    pub fn prims(&self) -> Vec<PrimLabel> {
        let mut v: Vec<PrimLabel> = self
            .subterms()
            .into_iter()
            .filter_map(|t| t.as_prim().cloned())
            .collect();
        v.sort();
        v
    }

    /// Number of distinct compound subterms.
    pub fn c_size(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if let DKind::D(a, b) = &t.0.kind {
                if seen.insert(t.addr()) {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        seen.len()
    }

    /// Sum of the compacted sizes of all distinct subterms.
    pub fn sc_size(&self) -> u64 {
        let nodes = self.compound_subterms();
        let index: HashMap<usize, usize> = nodes.iter().enumerate().map(|(k, t)| (t.addr(), k)).collect();
        let words = nodes.len().div_ceil(64);
        let mut sets: Vec<Vec<u64>> = Vec::with_capacity(nodes.len());
        let mut total = 0u64;
        for (k, t) in nodes.iter().enumerate() {
            let mut set = vec![0u64; words];
            set[k / 64] |= 1 << (k % 64);
            let (a, b) = t.children().expect("compound");
            for c in [a, b] {
                if let Some(&j) = index.get(&c.addr()) {
                    for (w, x) in set.iter_mut().zip(&sets[j]) {
                        *w |= x;
                    }
                }
            }
            total += set.iter().map(|w| w.count_ones() as u64).sum::<u64>();
            sets.push(set);
        }
        total
    }

    pub fn measure(&self) -> SizeReport {
        SizeReport {
            t_size: self.t_size(),
            height: self.height(),
            c_size: self.c_size(),
            sc_size: self.sc_size(),
        }
    }

    /// Longest runs of consecutive major (left) and minor (right) edges on
    /// a root-to-leaf path.
    pub fn successive_heights(&self) -> (u32, u32) {
        let mut runs: HashMap<usize, (u32, u32)> = HashMap::new();
        let (mut kl, mut kr) = (0, 0);
        for t in self.subterms() {
            let r = match t.children() {
                Some((a, b)) => (runs[&a.addr()].0 + 1, runs[&b.addr()].1 + 1),
                None => (0, 0),
            };
            kl = kl.max(r.0);
            kr = kr.max(r.1);
            runs.insert(t.addr(), r);
        }
        (kl, kr)
    }

    /// A D-term is prime when no compound subterm occurs twice, i.e. its tree
    /// and compacted sizes agree.
    pub fn is_prime(&self) -> bool {
        self.t_size() == self.c_size() as u64
    }

    /// All positions in pre-order. Position `1` is the major premise.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go(t: &DTerm, path: &mut Vec<u32>, out: &mut Vec<Position>) {
            out.push(Position::from_slice(path));
            if let Some((a, b)) = t.children() {
                path.push(1);
                go(a, path, out);
                path.pop();
                path.push(2);
                go(b, path, out);
                path.pop();
            }
        }
        go(self, &mut path, &mut out);
        out
    }

    /// Positions paired with the subterm found there, in pre-order.
    pub fn positioned_subterms(&self) -> Vec<(Position, DTerm)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go(t: &DTerm, path: &mut Vec<u32>, out: &mut Vec<(Position, DTerm)>) {
            out.push((Position::from_slice(path), t.clone()));
            if let Some((a, b)) = t.children() {
                path.push(1);
                go(a, path, out);
                path.pop();
                path.push(2);
                go(b, path, out);
                path.pop();
            }
        }
        go(self, &mut path, &mut out);
        out
    }

    /// Positions `p` with `self|_p = e`.
    pub fn occurrences(&self, e: &DTerm) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go(t: &DTerm, e: &DTerm, path: &mut Vec<u32>, out: &mut Vec<Position>) {
            if t == e {
                out.push(Position::from_slice(path));
                return;
            }
            if t.t_size() <= e.t_size() {
                return;
            }
            if let Some((a, b)) = t.children() {
                path.push(1);
                go(a, e, path, out);
                path.pop();
                path.push(2);
                go(b, e, path, out);
                path.pop();
            }
        }
        go(self, e, &mut path, &mut out);
        out
    }

    pub fn subterm_at(&self, p: &Position) -> Result<DTerm> {
        let mut t = self;
        for &i in p.path() {
            let (a, b) = t.children().ok_or_else(|| Error::PositionOutOfRange(p.clone()))?;
            t = match i {
                1 => a,
                2 => b,
                _ => return Err(Error::PositionOutOfRange(p.clone())),
            };
        }
        Ok(t.clone())
    }

    /// `d[e]_p`
    pub fn replace_at(&self, p: &Position, e: &DTerm) -> Result<DTerm> {
        fn go(t: &DTerm, path: &[u32], e: &DTerm, p: &Position) -> Result<DTerm> {
            let Some((&i, rest)) = path.split_first() else {
                return Ok(e.clone());
            };
            let (a, b) = t.children().ok_or_else(|| Error::PositionOutOfRange(p.clone()))?;
            match i {
                1 => Ok(DTerm::d(&go(a, rest, e, p)?, b)),
                2 => Ok(DTerm::d(a, &go(b, rest, e, p)?)),
                _ => Err(Error::PositionOutOfRange(p.clone())),
            }
        }
        go(self, p.path(), e, p)
    }

    /// Replace every occurrence of `from` by `to`.
    pub fn replace_all(&self, from: &DTerm, to: &DTerm) -> DTerm {
        let mut memo: HashMap<usize, DTerm> = HashMap::new();
        fn go(t: &DTerm, from: &DTerm, to: &DTerm, memo: &mut HashMap<usize, DTerm>) -> DTerm {
            if t == from {
                return to.clone();
            }
            let Some((a, b)) = t.children() else {
                return t.clone();
            };
            if let Some(r) = memo.get(&t.addr()) {
                return r.clone();
            }
            let r = DTerm::d(&go(a, from, to, memo), &go(b, from, to, memo));
            memo.insert(t.addr(), r.clone());
            r
        }
        go(self, from, to, &mut memo)
    }

    /// Substitute D-terms for primitive labels.
    pub fn substitute_prims(&self, f: &dyn Fn(&PrimLabel) -> Option<DTerm>) -> DTerm {
        let mut memo: HashMap<usize, DTerm> = HashMap::new();
        fn go(t: &DTerm, f: &dyn Fn(&PrimLabel) -> Option<DTerm>, memo: &mut HashMap<usize, DTerm>) -> DTerm {
            if let Some(r) = memo.get(&t.addr()) {
                return r.clone();
            }
            let r = match &t.0.kind {
                DKind::Prim(l) => f(l).unwrap_or_else(|| t.clone()),
                DKind::D(a, b) => DTerm::d(&go(a, f, memo), &go(b, f, memo)),
            };
            memo.insert(t.addr(), r.clone());
            r
        }
        go(self, f, &mut memo)
    }

    /// `self ⊵ e`
    pub fn has_subterm(&self, e: &DTerm) -> bool {
        if self == e {
            return true;
        }
        if self.t_size() <= e.t_size() {
            return false;
        }
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if t == e {
                return true;
            }
            if let Some((a, b)) = t.children() {
                if t.t_size() > e.t_size() && seen.insert(t.addr()) {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        false
    }

    /// `self ▷ e`
    pub fn has_strict_subterm(&self, e: &DTerm) -> bool {
        self != e && self.has_subterm(e)
    }
}

/// `d ≥c e`: Sub(d) ⊇ Sub(e).
pub fn c_geq(d: &DTerm, e: &DTerm) -> bool {
    let sub_d: HashSet<usize> = d.strict_compound_subterms().iter().map(DTerm::addr).collect();
    e.strict_compound_subterms().iter().all(|x| sub_d.contains(&x.addr()))
}

/// `d >c e`: Sub(d) ⊋ Sub(e).
pub fn c_gt(d: &DTerm, e: &DTerm) -> bool {
    let sub_d: HashSet<usize> = d.strict_compound_subterms().iter().map(DTerm::addr).collect();
    let sub_e = e.strict_compound_subterms();
    sub_e.len() < sub_d.len() && sub_e.iter().all(|x| sub_d.contains(&x.addr()))
}

/// `{e | d ≥c e, DPrim(e) ⊆ DPrim(d)}`, built as
/// `{D(d1, d2) | d ▷ d1, d ▷ d2} ∪ DPrim(d)`.
pub fn c_smaller_set(d: &DTerm) -> Vec<DTerm> {
    let strict = d.strict_subterms();
    let mut out: Vec<DTerm> = Vec::with_capacity(strict.len() * strict.len() + 1);
    for a in &strict {
        for b in &strict {
            out.push(DTerm::d(a, b));
        }
    }
    out.extend(d.prims().into_iter().map(DTerm::prim));
    out
}

/// The closed-form size of [`c_smaller_set`].
pub fn c_smaller_count(d: &DTerm) -> u64 {
    let p = d.prims().len() as u64;
    let base = d.c_size() as u64 + p - 1;
    base * base + p
}

/// Structure measures of a D-term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeReport {
    pub t_size: u64,
    pub height: u32,
    pub c_size: usize,
    pub sc_size: u64,
}

impl PartialEq for DTerm {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}
impl Eq for DTerm {}

impl Hash for DTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

/// Structural order: primitives first (by label), then compound D-terms by
/// tree size, then major premise, then minor premise.
impl Ord for DTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        match (&self.0.kind, &other.0.kind) {
            (DKind::Prim(a), DKind::Prim(b)) => a.cmp(b),
            (DKind::Prim(_), DKind::D(..)) => Ordering::Less,
            (DKind::D(..), DKind::Prim(_)) => Ordering::Greater,
            (DKind::D(a1, b1), DKind::D(a2, b2)) => self
                .t_size()
                .cmp(&other.t_size())
                .then_with(|| a1.cmp(a2))
                .then_with(|| b1.cmp(b2)),
        }
    }
}

impl PartialOrd for DTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::formats::dnotation::print(self))
    }
}

impl fmt::Debug for DTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> DTerm {
        DTerm::prim("1")
    }
    fn d(a: &DTerm, b: &DTerm) -> DTerm {
        DTerm::d(a, b)
    }

    #[test]
    fn hash_consing_shares_nodes() {
        let a = d(&one(), &one());
        let b = d(&one(), &one());
        assert_eq!(a, b);
        assert_eq!(a.id(), b.id());
    }

    #[test]
    fn measures_of_small_terms() {
        let o = one();
        let d11 = d(&o, &o);
        let d1_11 = d(&o, &d11);
        let t = d(&d11, &d(&d1_11, &d1_11));
        assert_eq!(t.t_size(), 7);
        assert_eq!(t.height(), 4);
        assert_eq!(t.c_size(), 4);
        assert!(!t.is_prime());
        let left = crate::formats::dnotation::parse("DDD1111").unwrap();
        assert_eq!(left.successive_heights(), (3, 1));
        assert!(d1_11.is_prime());
    }

    #[test]
    fn interner_releases_dropped_nodes() {
        {
            let o = DTerm::prim("zz-unique");
            let _t = d(&o, &d(&o, &o));
            assert!(interner().contains_key(&Key::Prim(Arc::from("zz-unique"))));
        }
        assert!(!interner().contains_key(&Key::Prim(Arc::from("zz-unique"))));
    }

    #[test]
    fn prim_label_order() {
        let mut v: Vec<PrimLabel> = ["10", "2", "n", "1"].iter().map(|s| PrimLabel::new(s)).collect();
        v.sort();
        let s: Vec<&str> = v.iter().map(|l| l.as_str()).collect();
        assert_eq!(s, ["1", "2", "10", "n"]);
    }
}
