//! Proof-shortening rewrites on D-terms.
//!
//! Single-occurrence reductions (IS, MS, S) replace a subproof by one of its
//! own subproofs. All-occurrence reductions (MC, C) replace every occurrence
//! of a subproof by a D-term that is smaller in the compaction ordering.
//! `n` leaves count as ordinary primitive leaves in the structure measures.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dterm::{DTerm, SizeReport};
use crate::error::{Error, Result};
use crate::semantics::{admits_n, invalid_n_use, AxiomAssignment, IptTable, MgtCache};
use crate::term::{subsumes, FTerm, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ReductionKind {
    NSimp,
    IS,
    MS,
    S,
    MC,
    C,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 6] = [
        ReductionKind::NSimp,
        ReductionKind::IS,
        ReductionKind::MS,
        ReductionKind::S,
        ReductionKind::MC,
        ReductionKind::C,
    ];

    pub fn is_s_family(self) -> bool {
        matches!(self, ReductionKind::IS | ReductionKind::MS | ReductionKind::S)
    }

    pub fn is_c_family(self) -> bool {
        matches!(self, ReductionKind::MC | ReductionKind::C)
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionKind::NSimp => "n",
            ReductionKind::IS => "IS",
            ReductionKind::MS => "MS",
            ReductionKind::S => "S",
            ReductionKind::MC => "MC",
            ReductionKind::C => "C",
        })
    }
}

impl FromStr for ReductionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "nsimp" | "n-simp" => Ok(ReductionKind::NSimp),
            "is" => Ok(ReductionKind::IS),
            "ms" => Ok(ReductionKind::MS),
            "s" => Ok(ReductionKind::S),
            "mc" => Ok(ReductionKind::MC),
            "c" => Ok(ReductionKind::C),
            _ => Err(format!("unknown reduction kind `{s}`")),
        }
    }
}

/// Where a reduction step applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Site {
    /// `d|_p` is replaced by `d|_{p'}`.
    Positions(Position, Position),
    /// Every occurrence of the subterm is replaced.
    Subterm(DTerm),
    Whole,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Positions(p, q) => write!(f, "{p} <- {q}"),
            Site::Subterm(e) => write!(f, "{e}"),
            Site::Whole => f.write_str("*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub kind: ReductionKind,
    pub site: Site,
    pub replacement: DTerm,
    pub before: SizeReport,
    pub after: SizeReport,
}

/// The triple `(c_size, sc_size, t_size)`. C-family steps decrease it
/// lexically; S-family steps decrease `t_size` but can raise `c_size`.
pub fn lex_measure(d: &DTerm) -> (usize, u64, u64) {
    (d.c_size(), d.sc_size(), d.t_size())
}

fn undefined(d: &DTerm) -> Error {
    Error::UndefinedMgt(d.to_string())
}

/// n-simplification: the minor premise of `D(d1, d2)` becomes `n` whenever
/// the theorem of `d1` does not depend on it.
pub fn n_simplify(d: &DTerm, alpha: &AxiomAssignment) -> Result<DTerm> {
    let mut cache = MgtCache::new(alpha);
    n_simplify_with(d, &mut cache)
}

pub(crate) fn n_simplify_with(d: &DTerm, cache: &mut MgtCache) -> Result<DTerm> {
    let mut memo: HashMap<DTerm, DTerm> = HashMap::new();
    for t in d.subterms() {
        let Some((a, b)) = t.children() else {
            memo.insert(t.clone(), t);
            continue;
        };
        let ma = cache.mgt(a)?.ok_or_else(|| undefined(a))?;
        let a2 = memo[a].clone();
        let b2 = if admits_n(&ma) { DTerm::n() } else { memo[b].clone() };
        memo.insert(t.clone(), DTerm::d(&a2, &b2));
    }
    Ok(memo.remove(d).expect("root visited"))
}

/// Subtree extent in pre-order: node `i` covers `i..end[i]`.
struct PreOrder {
    nodes: Vec<(Position, DTerm)>,
    end: Vec<usize>,
    post: Vec<usize>,
}

impl PreOrder {
    fn new(d: &DTerm) -> Self {
        let nodes = d.positioned_subterms();
        let end: Vec<usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, (_, t))| i + 2 * t.t_size() as usize + 1)
            .collect();
        // Post-order: children before parents, major before minor.
        let mut post = Vec::with_capacity(nodes.len());
        let mut stack = vec![(0usize, false)];
        while let Some((i, expanded)) = stack.pop() {
            if expanded || nodes[i].1.is_prim() {
                post.push(i);
                continue;
            }
            stack.push((i, true));
            let minor = i + 1 + 2 * nodes[i + 1].1.t_size() as usize + 1;
            stack.push((minor, false));
            stack.push((i + 1, false));
        }
        PreOrder { nodes, end, post }
    }
}

fn s_guard(
    kind: ReductionKind,
    table: &IptTable,
    cache: &mut MgtCache,
    (p, dp): &(Position, DTerm),
    (q, dq): &(Position, DTerm),
) -> Result<bool> {
    Ok(match kind {
        ReductionKind::IS => table.get(p) == table.get(q),
        ReductionKind::MS => {
            let mq = cache.mgt(dq)?.ok_or_else(|| undefined(dq))?;
            let mp = cache.mgt(dp)?.ok_or_else(|| undefined(dp))?;
            subsumes(&mq, &mp)
        }
        ReductionKind::S => {
            let mq = cache.mgt(dq)?.ok_or_else(|| undefined(dq))?;
            subsumes(&mq, table.get(p).expect("position"))
        }
        _ => unreachable!("not a single-occurrence reduction"),
    })
}

fn ipt_table(d: &DTerm, alpha: &AxiomAssignment) -> Result<IptTable> {
    IptTable::new(d, alpha)?.ok_or_else(|| undefined(d))
}

fn contains_n(d: &DTerm) -> bool {
    d.prims().iter().any(|l| l.is_n())
}

/// Pairs `(p, p')` with `p` a strict prefix of `p'` for which the kind's
/// guard holds, innermost-leftmost `p` first. Pairs with `d|_{p'} = n` and
/// pairs whose result misuses `n` are left out.
pub fn find_s_family(d: &DTerm, alpha: &AxiomAssignment, kind: ReductionKind) -> Result<Vec<(Position, Position)>> {
    let mut cache = MgtCache::new(alpha);
    s_family_with(d, alpha, kind, &mut cache, usize::MAX)
}

pub(crate) fn s_family_with(
    d: &DTerm,
    alpha: &AxiomAssignment,
    kind: ReductionKind,
    cache: &mut MgtCache,
    limit: usize,
) -> Result<Vec<(Position, Position)>> {
    assert!(kind.is_s_family(), "{kind} is not a single-occurrence reduction");
    let mut out = Vec::new();
    if d.is_prim() || limit == 0 {
        return Ok(out);
    }
    let table = ipt_table(d, alpha)?;
    let check_n = contains_n(d);
    let pre = PreOrder::new(d);
    for &i in &pre.post {
        for j in i + 1..pre.end[i] {
            let (np, nq) = (&pre.nodes[i], &pre.nodes[j]);
            if nq.1.is_n() || !s_guard(kind, &table, cache, np, nq)? {
                continue;
            }
            if check_n {
                let r = d.replace_at(&np.0, &nq.1)?;
                if invalid_n_use(&r, alpha)?.is_some() {
                    continue;
                }
            }
            out.push((np.0.clone(), nq.0.clone()));
            if out.len() >= limit {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

/// `d[d|_{p'}]_p`
pub fn apply_s_reduction(d: &DTerm, p: &Position, p_prime: &Position) -> Result<DTerm> {
    if !p.is_strict_prefix_of(p_prime) {
        return Err(Error::PositionOutOfRange(p_prime.clone()));
    }
    let sub = d.subterm_at(p_prime)?;
    d.replace_at(p, &sub)
}

/// Pairs `(e, e')` with `e` a compound subterm of `d` and `e >c e'` for which
/// the kind's guard holds. Ordered by descending `c_size(e)`, then ascending
/// `c_size(e')`. `e' = n` and results that misuse `n` are left out.
pub fn find_c_family(d: &DTerm, alpha: &AxiomAssignment, kind: ReductionKind) -> Result<Vec<(DTerm, DTerm)>> {
    let mut cache = MgtCache::new(alpha);
    c_family_with(d, alpha, kind, &mut cache, usize::MAX)
}

pub(crate) fn c_family_with(
    d: &DTerm,
    alpha: &AxiomAssignment,
    kind: ReductionKind,
    cache: &mut MgtCache,
    limit: usize,
) -> Result<Vec<(DTerm, DTerm)>> {
    assert!(kind.is_c_family(), "{kind} is not an all-occurrence reduction");
    let mut out = Vec::new();
    if d.is_prim() || limit == 0 {
        return Ok(out);
    }
    let table = match kind {
        ReductionKind::C => Some(ipt_table(d, alpha)?),
        _ => None,
    };
    let check_n = contains_n(d);
    let mut es: Vec<(usize, DTerm)> = d.compound_subterms().into_iter().map(|e| (e.c_size(), e)).collect();
    es.sort_by(|a, b| b.0.cmp(&a.0));
    for (ce, e) in es {
        let me = cache.mgt(&e)?.ok_or_else(|| undefined(&e))?;
        let occ_ipts: Vec<FTerm> = match &table {
            Some(t) => d
                .occurrences(&e)
                .iter()
                .map(|p| t.get(p).expect("position").clone())
                .collect(),
            None => Vec::new(),
        };
        let mut cands: Vec<(usize, DTerm)> = crate::dterm::c_smaller_set(&e)
            .into_iter()
            .filter(|f| !f.is_n())
            .map(|f| (f.c_size(), f))
            .filter(|(cf, f)| if f.is_prim() { ce > 1 } else { *cf < ce })
            .collect();
        cands.sort_by_key(|c| c.0);
        for (_, f) in cands {
            let Some(mf) = cache.mgt(&f)? else { continue };
            let ok = match kind {
                ReductionKind::MC => subsumes(&mf, &me),
                _ => occ_ipts.iter().all(|t| subsumes(&mf, t)),
            };
            if !ok {
                continue;
            }
            if check_n || contains_n(&f) {
                let r = d.replace_all(&e, &f);
                if invalid_n_use(&r, alpha)?.is_some() {
                    continue;
                }
            }
            out.push((e.clone(), f));
            if out.len() >= limit {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

/// `d[e ↦ e']`
pub fn apply_c_reduction(d: &DTerm, e: &DTerm, e_prime: &DTerm) -> DTerm {
    d.replace_all(e, e_prime)
}

/// Whether no reduction of the given kind applies.
pub fn is_regular(d: &DTerm, alpha: &AxiomAssignment, kind: ReductionKind) -> Result<bool> {
    let mut cache = MgtCache::new(alpha);
    is_regular_with(d, alpha, kind, &mut cache)
}

pub(crate) fn is_regular_with(
    d: &DTerm,
    alpha: &AxiomAssignment,
    kind: ReductionKind,
    cache: &mut MgtCache,
) -> Result<bool> {
    Ok(match kind {
        ReductionKind::NSimp => n_simplify_with(d, cache)? == *d,
        k if k.is_s_family() => s_family_with(d, alpha, k, cache, 1)?.is_empty(),
        k => c_family_with(d, alpha, k, cache, 1)?.is_empty(),
    })
}

#[derive(Debug, Clone)]
pub struct NormalizeOptions {
    pub kinds: Vec<ReductionKind>,
    /// Re-run n-simplification on the result.
    pub restore_n: bool,
    pub max_steps: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            kinds: vec![ReductionKind::S, ReductionKind::C],
            restore_n: false,
            max_steps: 100_000,
        }
    }
}

impl NormalizeOptions {
    pub fn kinds(kinds: &[ReductionKind]) -> Self {
        NormalizeOptions {
            kinds: kinds.to_vec(),
            ..Self::default()
        }
    }
}

/// Apply the selected reductions until none applies. Kinds are tried in the
/// order IS, MS, S, MC, C; the first applicable pair of the first kind wins.
pub fn normalize(d: &DTerm, alpha: &AxiomAssignment, opts: &NormalizeOptions) -> Result<(DTerm, Vec<ReductionStep>)> {
    let mut cache = MgtCache::new(alpha);
    let mut kinds = opts.kinds.clone();
    kinds.sort();
    kinds.dedup();
    let mut trace = Vec::new();
    let mut cur = d.clone();
    if cache.mgt(&cur)?.is_none() {
        return Err(undefined(&cur));
    }
    if kinds.contains(&ReductionKind::NSimp) {
        let next = n_simplify_with(&cur, &mut cache)?;
        if next != cur {
            trace.push(ReductionStep {
                kind: ReductionKind::NSimp,
                site: Site::Whole,
                replacement: next.clone(),
                before: cur.measure(),
                after: next.measure(),
            });
            cur = next;
        }
    }
    'outer: loop {
        if trace.len() >= opts.max_steps {
            return Err(Error::ResourceLimit(format!("more than {} reduction steps", opts.max_steps)));
        }
        for &k in kinds.iter().filter(|k| **k != ReductionKind::NSimp) {
            let step = if k.is_s_family() {
                s_family_with(&cur, alpha, k, &mut cache, 1)?
                    .into_iter()
                    .next()
                    .map(|(p, q)| -> Result<_> {
                        let next = apply_s_reduction(&cur, &p, &q)?;
                        let sub = cur.subterm_at(&q)?;
                        Ok((Site::Positions(p, q), sub, next))
                    })
                    .transpose()?
            } else {
                c_family_with(&cur, alpha, k, &mut cache, 1)?
                    .into_iter()
                    .next()
                    .map(|(e, f)| {
                        let next = apply_c_reduction(&cur, &e, &f);
                        (Site::Subterm(e), f, next)
                    })
            };
            if let Some((site, replacement, next)) = step {
                // Single-occurrence steps shrink the tree but may unshare
                // subterms, so only the C family is checked on the triple.
                debug_assert!(if k.is_s_family() {
                    next.t_size() < cur.t_size()
                } else {
                    lex_measure(&next) < lex_measure(&cur)
                });
                trace.push(ReductionStep {
                    kind: k,
                    site,
                    replacement,
                    before: cur.measure(),
                    after: next.measure(),
                });
                cur = next;
                continue 'outer;
            }
        }
        break;
    }
    if opts.restore_n {
        cur = n_simplify_with(&cur, &mut cache)?;
    }
    Ok((cur, trace))
}
