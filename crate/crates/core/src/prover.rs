//! Axiom-driven proof search by structure enumeration.
//!
//! D-terms are generated level by level from retained lemmas. Each candidate
//! gets its most general theorem from the theorems of its premises; candidates
//! without one, or with one that is too large or already known, are dropped.
//! Every candidate is tested against the goal before the size filters apply.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::compacted::{compact, compact_numbered, CompactedDTerm};
use crate::dterm::{DTerm, PrimLabel, SizeReport};
use crate::error::{Error, Result};
use crate::flat::{self, subsumes_flat, Detacher, Flat};
use crate::formats::polish;
use crate::semantics::{AxiomAssignment, Problem};
use crate::term::{FTerm, Sym};

/// How level `k + 1` is built from the retained lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    /// `D(d, e)` and `D(e, d)` for `d` of the last level and `e` a subterm of `d`.
    Psp,
    /// `D(d, a)` and `D(a, d)` for `d` of the last level and `a` an axiom.
    Prime,
    /// All combinations of retained lemmas with tree size `k + 1`.
    TSize,
    Height,
    CSize,
}

impl FromStr for PolicyKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "psp" => Ok(PolicyKind::Psp),
            "prime" => Ok(PolicyKind::Prime),
            "tsize" | "t_size" => Ok(PolicyKind::TSize),
            "height" => Ok(PolicyKind::Height),
            "csize" | "c_size" => Ok(PolicyKind::CSize),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Psp => "psp",
            PolicyKind::Prime => "prime",
            PolicyKind::TSize => "tsize",
            PolicyKind::Height => "height",
            PolicyKind::CSize => "csize",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dedup {
    /// Drop a candidate whose theorem is a variant of a known one.
    Variant,
    /// Drop a candidate whose theorem is subsumed by a known one.
    Subsumption,
}

impl FromStr for Dedup {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "variant" => Ok(Dedup::Variant),
            "subsumption" => Ok(Dedup::Subsumption),
            other => Err(format!("unknown dedup mode `{other}`")),
        }
    }
}

/// Upper limits on the theorems of retained lemmas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    pub max_ft: Option<u64>,
    pub max_fh: Option<u32>,
    pub max_fv: Option<usize>,
}

impl Thresholds {
    pub fn admits(&self, f: &FTerm) -> bool {
        self.max_ft.is_none_or(|m| f.tree_size() <= m)
            && self.max_fh.is_none_or(|m| f.height() <= m)
            && self.max_fv.is_none_or(|m| f.vars().len() <= m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumPolicy {
    pub kind: PolicyKind,
    pub max_level: usize,
    pub thresholds: Thresholds,
    pub dedup: Dedup,
    /// Most lemmas retained per level. Beyond that, lemmas with the largest
    /// theorem tree size go first, then larger height, then later arrival.
    pub cache_cap: Option<usize>,
    /// Also try `n` as minor premise where the major premise admits it.
    pub use_n: bool,
    /// Wall-clock budget for the whole search.
    #[serde(skip)]
    pub timeout: Option<Duration>,
}

impl Default for EnumPolicy {
    fn default() -> Self {
        EnumPolicy {
            kind: PolicyKind::Psp,
            max_level: 30,
            thresholds: Thresholds::default(),
            dedup: Dedup::Variant,
            cache_cap: None,
            use_n: false,
            timeout: None,
        }
    }
}

impl EnumPolicy {
    pub fn new(kind: PolicyKind, max_level: usize) -> Self {
        EnumPolicy {
            kind,
            max_level,
            ..Default::default()
        }
    }

    /// PSP with theorem size limits 17/7 and subsumption dedup, which
    /// finds Syll from the Łukasiewicz axiom in seconds.
    pub fn lcl038() -> Self {
        EnumPolicy {
            thresholds: Thresholds {
                max_ft: Some(17),
                max_fh: Some(7),
                max_fv: None,
            },
            dedup: Dedup::Subsumption,
            max_level: 40,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let t = &self.thresholds;
        if t.max_ft == Some(0) || t.max_fh == Some(0) || t.max_fv == Some(0) || self.cache_cap == Some(0) {
            return Err(Error::InvalidProblem("thresholds and cache cap must be positive".into()));
        }
        Ok(())
    }
}

/// A retained D-term with its (canonical) most general theorem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaEntry {
    pub dterm: DTerm,
    pub mgt: FTerm,
    pub level: usize,
}

/// Candidate counts for one level.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub generated: usize,
    pub undefined: usize,
    pub over_threshold: usize,
    pub duplicate: usize,
    pub evicted: usize,
    pub kept: usize,
}

#[derive(Debug, Clone)]
pub struct ProofResult {
    pub delta: CompactedDTerm,
    pub dterm: DTerm,
    pub mgt: FTerm,
    pub sizes: SizeReport,
    pub goal: FTerm,
    pub level: usize,
    pub stats: Vec<LevelStats>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub enum ProveOutcome {
    Proved(Box<ProofResult>),
    /// All levels up to the maximum were explored without a proof.
    Exhausted(Vec<LevelStats>),
}

/// Level-wise lemma generation shared by [`prove`] and [`enumerate_lemmas`].
struct Search {
    policy: EnumPolicy,
    axioms: Vec<PrimLabel>,
    /// Theorems of all retained lemmas, axioms and `n`.
    mgts: HashMap<DTerm, Flat>,
    known: HashSet<Flat>,
    index: flat::Index,
    levels: Vec<Vec<DTerm>>,
    stats: Vec<LevelStats>,
    started: Instant,
    consts: Vec<Sym>,
    goal: Option<Flat>,
}

enum Eval {
    Undefined,
    TooLarge,
    Duplicate,
    Theorem(Flat),
}

/// Candidates are evaluated in chunks to bound memory.
const CHUNK: usize = 1 << 16;

impl Search {
    fn new(alpha: &AxiomAssignment, policy: &EnumPolicy, goal: Option<&FTerm>) -> Result<Self> {
        policy.validate()?;
        let axioms: Vec<PrimLabel> = alpha.labels().cloned().collect();
        let mut consts = Vec::new();
        let goal = match goal {
            Some(g) => Some(Flat::encode(g, &mut consts).ok_or_else(|| Error::NonImplicational(polish::print_polish(g)))?),
            None => None,
        };
        let mut s = Search {
            policy: policy.clone(),
            axioms: axioms.clone(),
            mgts: HashMap::new(),
            known: HashSet::new(),
            index: flat::Index::default(),
            levels: Vec::new(),
            stats: Vec::new(),
            started: Instant::now(),
            consts,
            goal,
        };
        s.mgts.insert(DTerm::n(), Flat(vec![1].into()));
        let mut level0 = Vec::new();
        for a in &axioms {
            let d = DTerm::prim(a.clone());
            let f = alpha.formula(a).expect("axiom");
            let f = Flat::encode(f, &mut Vec::new())
                .filter(|x| x.0.iter().all(|&c| c < flat::CONST))
                .ok_or_else(|| Error::NonImplicational(polish::print_polish(f)))?;
            s.mgts.insert(d.clone(), f.clone());
            if s.known.insert(f.clone()) {
                s.index.insert(f);
            }
            level0.push(d);
        }
        s.stats.push(LevelStats {
            level: 0,
            generated: level0.len(),
            kept: level0.len(),
            ..Default::default()
        });
        s.levels.push(level0);
        Ok(s)
    }

    fn decode(&self, f: &Flat) -> FTerm {
        f.decode(&self.consts)
    }

    fn hits_goal(&self, f: &Flat) -> bool {
        self.goal.as_ref().is_some_and(|g| subsumes_flat(f, g))
    }

    fn admits(&self, f: &Flat) -> bool {
        let t = &self.policy.thresholds;
        t.max_ft.is_none_or(|m| f.tree_size() <= m)
            && t.max_fh.is_none_or(|m| f.height() <= m)
            && t.max_fv.is_none_or(|m| f.var_count() <= m)
    }

    /// Longest code worth building: anything longer is over the tree-size
    /// threshold and too large to subsume the goal.
    fn max_len(&self) -> usize {
        match self.policy.thresholds.max_ft {
            Some(ft) => (2 * ft as usize + 1).max(self.goal.as_ref().map_or(0, |g| g.0.len())),
            None => usize::MAX,
        }
    }

    fn check_time(&self) -> Result<()> {
        match self.policy.timeout {
            Some(t) if self.started.elapsed() > t => Err(Error::ResourceLimit(format!(
                "search exceeded {:.1} s",
                t.as_secs_f64()
            ))),
            _ => Ok(()),
        }
    }

    /// Children of one parent under the PSP and prime policies.
    fn children_of(&self, d: &DTerm, axioms: &[DTerm], out: &mut Vec<DTerm>) {
        let start = out.len();
        match self.policy.kind {
            PolicyKind::Psp => {
                let subs = d.subterms();
                for e in subs.iter().rev() {
                    out.push(DTerm::d(d, e));
                }
                for e in subs.iter().rev().skip(1) {
                    out.push(DTerm::d(e, d));
                }
                if axioms.len() > 1 || d.is_prim() {
                    for a in axioms {
                        out.push(DTerm::d(d, a));
                        out.push(DTerm::d(a, d));
                    }
                }
            }
            _ => {
                for a in axioms {
                    out.push(DTerm::d(d, a));
                    out.push(DTerm::d(a, d));
                }
            }
        }
        if self.policy.use_n && self.mgts[d].admits_n() {
            out.push(DTerm::d(d, &DTerm::n()));
        }
        // Different parents never share a child, so duplicates are local.
        let mut seen = HashSet::new();
        let mut k = start;
        for i in start..out.len() {
            if seen.insert(out[i].clone()) {
                out.swap(k, i);
                k += 1;
            }
        }
        out.truncate(k);
    }

    /// All candidates of the next level under the size policies.
    fn combinations(&self) -> Vec<DTerm> {
        let k = self.levels.len();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut push = |d: DTerm| {
            if seen.insert(d.clone()) {
                out.push(d);
            }
        };
        match self.policy.kind {
            PolicyKind::TSize => {
                // Level i holds tree size i.
                for i in 0..k {
                    for x in &self.levels[i] {
                        for y in &self.levels[k - 1 - i] {
                            push(DTerm::d(x, y));
                        }
                    }
                }
            }
            PolicyKind::Height => {
                for i in 0..k {
                    for j in 0..k {
                        if i.max(j) == k - 1 {
                            for x in &self.levels[i] {
                                for y in &self.levels[j] {
                                    push(DTerm::d(x, y));
                                }
                            }
                        }
                    }
                }
            }
            PolicyKind::CSize => {
                for i in 0..k {
                    for j in 0..k {
                        if i.max(j) + 1 > k || i + j + 1 < k {
                            continue;
                        }
                        for x in &self.levels[i] {
                            for y in &self.levels[j] {
                                let d = DTerm::d(x, y);
                                if d.c_size() == k {
                                    push(d);
                                }
                            }
                        }
                    }
                }
            }
            PolicyKind::Psp | PolicyKind::Prime => unreachable!("parent-driven policies"),
        }
        if self.policy.use_n {
            for d in &self.levels[k - 1] {
                if self.mgts[d].admits_n() {
                    push(DTerm::d(d, &DTerm::n()));
                }
            }
        }
        out
    }

    fn evaluate(&self, cands: &[DTerm]) -> Vec<Eval> {
        let max_len = self.max_len();
        cands
            .par_iter()
            .map_init(Detacher::default, |det, d| {
                let (a, b) = d.children().expect("compound");
                let (Some(ma), Some(mb)) = (self.mgts.get(a), self.mgts.get(b)) else {
                    return Eval::Undefined;
                };
                let mut overflow = false;
                match det.detach(ma, mb, max_len, &mut overflow) {
                    Some(f) => Eval::Theorem(f),
                    None if overflow => Eval::TooLarge,
                    None => Eval::Undefined,
                }
            })
            .collect()
    }

    fn is_duplicate(&self, f: &Flat) -> bool {
        match self.policy.dedup {
            Dedup::Variant => self.known.contains(f),
            Dedup::Subsumption => self.known.contains(f) || self.index.generalizes(f),
        }
    }

    /// Evaluate and filter a chunk of candidates, in order.
    fn process(&mut self, chunk: &[DTerm], st: &mut LevelStats, kept: &mut Vec<(DTerm, Flat)>) -> Result<Option<(DTerm, Flat)>> {
        st.generated += chunk.len();
        let mut evals = self.evaluate(chunk);
        if self.policy.dedup == Dedup::Subsumption {
            // Most duplicates are caught against the lemmas known before this
            // chunk; survivors are checked again in order below.
            let known: Vec<bool> = evals
                .par_iter()
                .map(|e| match e {
                    Eval::Theorem(m) => !self.hits_goal(m) && self.admits(m) && self.is_duplicate(m),
                    _ => false,
                })
                .collect();
            for (e, dup) in evals.iter_mut().zip(known) {
                if dup {
                    *e = Eval::Duplicate;
                }
            }
        }
        self.check_time()?;
        for (d, e) in chunk.iter().zip(evals) {
            let m = match e {
                Eval::Undefined => {
                    st.undefined += 1;
                    continue;
                }
                Eval::TooLarge => {
                    st.over_threshold += 1;
                    continue;
                }
                Eval::Duplicate => {
                    st.duplicate += 1;
                    continue;
                }
                Eval::Theorem(m) => m,
            };
            if self.hits_goal(&m) {
                return Ok(Some((d.clone(), m)));
            }
            if !self.admits(&m) {
                st.over_threshold += 1;
                continue;
            }
            if self.is_duplicate(&m) {
                st.duplicate += 1;
                continue;
            }
            self.known.insert(m.clone());
            if self.policy.dedup == Dedup::Subsumption {
                self.index.insert(m.clone());
            }
            kept.push((d.clone(), m));
        }
        Ok(None)
    }

    /// Compute the next level. With a goal, stops at the first candidate (in
    /// generation order) whose theorem subsumes it.
    fn step(&mut self) -> Result<Option<(DTerm, Flat)>> {
        self.check_time()?;
        let level = self.levels.len();
        let mut st = LevelStats {
            level,
            ..Default::default()
        };
        let mut kept: Vec<(DTerm, Flat)> = Vec::new();
        let mut found = None;
        if matches!(self.policy.kind, PolicyKind::Psp | PolicyKind::Prime) {
            let parents = self.levels[level - 1].clone();
            let axioms: Vec<DTerm> = self.axioms.iter().map(|a| DTerm::prim(a.clone())).collect();
            let mut buf = Vec::with_capacity(CHUNK + 64);
            for (i, d) in parents.iter().enumerate() {
                self.children_of(d, &axioms, &mut buf);
                if buf.len() >= CHUNK || i + 1 == parents.len() {
                    found = self.process(&buf, &mut st, &mut kept)?;
                    buf.clear();
                    if found.is_some() {
                        break;
                    }
                }
            }
        } else {
            let cands = self.combinations();
            for chunk in cands.chunks(CHUNK) {
                found = self.process(chunk, &mut st, &mut kept)?;
                if found.is_some() {
                    break;
                }
            }
        }
        if found.is_some() {
            self.stats.push(st);
            return Ok(found);
        }
        if let Some(cap) = self.policy.cache_cap {
            if kept.len() > cap {
                st.evicted = kept.len() - cap;
                let mut order: Vec<usize> = (0..kept.len()).collect();
                order.sort_by_key(|&i| (kept[i].1.tree_size(), kept[i].1.height(), i));
                order.truncate(cap);
                order.sort_unstable();
                let mut slots: Vec<Option<(DTerm, Flat)>> = kept.into_iter().map(Some).collect();
                kept = order.into_iter().map(|i| slots[i].take().expect("kept")).collect();
            }
        }
        st.kept = kept.len();
        let mut next = Vec::with_capacity(kept.len());
        for (d, m) in kept {
            self.mgts.insert(d.clone(), m);
            next.push(d);
        }
        self.levels.push(next);
        self.stats.push(st);
        Ok(None)
    }
}

/// Search for a proof of the problem's goal.
pub fn prove(problem: &Problem, policy: &EnumPolicy) -> Result<ProveOutcome> {
    let goal = problem
        .goal
        .clone()
        .ok_or_else(|| Error::InvalidProblem(format!("problem {} has no goal", problem.name)))?;
    let mut search = Search::new(&problem.axioms, policy, Some(&goal))?;
    let finish = |d: DTerm, m: Flat, level: usize, search: &Search| {
        let m = search.decode(&m);
        let (delta, _) = extract_numbered(&d, &problem.axioms);
        Box::new(ProofResult {
            sizes: d.measure(),
            delta,
            dterm: d,
            mgt: m,
            goal: goal.clone(),
            level,
            stats: search.stats.clone(),
            elapsed: search.started.elapsed(),
        })
    };
    for d in &search.levels[0] {
        let m = &search.mgts[d];
        if search.hits_goal(m) {
            return Ok(ProveOutcome::Proved(finish(d.clone(), m.clone(), 0, &search)));
        }
    }
    for level in 1..=policy.max_level {
        if let Some((d, m)) = search.step()? {
            return Ok(ProveOutcome::Proved(finish(d, m, level, &search)));
        }
        if search.levels[level].is_empty() && policy.kind != PolicyKind::TSize && policy.kind != PolicyKind::CSize {
            break;
        }
    }
    Ok(ProveOutcome::Exhausted(search.stats))
}

/// Goal-free enumeration of retained lemmas, level by level.
pub struct LemmaStream {
    search: Search,
    level: usize,
    pos: usize,
    failed: bool,
}

/// Lemmas retained under `policy`, starting with the axioms at level 0.
pub fn enumerate_lemmas(alpha: &AxiomAssignment, policy: &EnumPolicy) -> Result<LemmaStream> {
    Ok(LemmaStream {
        search: Search::new(alpha, policy, None)?,
        level: 0,
        pos: 0,
        failed: false,
    })
}

impl LemmaStream {
    /// Statistics of the levels computed so far.
    pub fn stats(&self) -> &[LevelStats] {
        &self.search.stats
    }
}

impl Iterator for LemmaStream {
    type Item = Result<LemmaEntry>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            if let Some(d) = self.search.levels.get(self.level).and_then(|l| l.get(self.pos)) {
                self.pos += 1;
                return Some(Ok(LemmaEntry {
                    dterm: d.clone(),
                    mgt: self.search.decode(&self.search.mgts[d]),
                    level: self.level,
                }));
            }
            if self.level >= self.search.policy.max_level {
                return None;
            }
            self.level += 1;
            self.pos = 0;
            if self.level >= self.search.levels.len() {
                if let Err(e) = self.search.step() {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// The minimal DAG of a proof with its root labelled `root`.
pub fn extract_compacted(d: &DTerm, root: &PrimLabel) -> CompactedDTerm {
    compact(&[(root.clone(), d.clone())])
}

/// As [`extract_compacted`], with numeric labels continuing after the
/// axiom labels; the root gets the last number. Returns the root label.
pub fn extract_numbered(d: &DTerm, alpha: &AxiomAssignment) -> (CompactedDTerm, PrimLabel) {
    let start = alpha.labels().filter_map(|l| l.as_number()).max().unwrap_or(0) + 1;
    let tmp = PrimLabel::new("root");
    let delta = compact_numbered(&[(tmp.clone(), d.clone())], start);
    let next = delta
        .bindings()
        .keys()
        .chain(delta.aliases().keys())
        .filter_map(|l| l.as_number())
        .max()
        .map_or(start, |k| k + 1);
    let root = PrimLabel::from(next as u32);
    let rename = |l: &PrimLabel| if *l == tmp { root.clone() } else { l.clone() };
    let bindings: Vec<(PrimLabel, DTerm)> = delta.bindings().iter().map(|(l, d)| (rename(l), d.clone())).collect();
    let aliases: Vec<(PrimLabel, PrimLabel)> = delta.aliases().iter().map(|(l, a)| (rename(l), a.clone())).collect();
    let delta = CompactedDTerm::with_aliases(bindings, aliases).expect("relabelled DAG stays valid");
    (delta, root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{dnotation, polish};
    use crate::term::variant;

    fn f(s: &str) -> FTerm {
        polish::parse_polish(s, &HashSet::new()).unwrap()
    }

    #[test]
    fn psp_level_one_is_d11() {
        let alpha = AxiomAssignment::single(&f("CCCpqrCCrpCsp"));
        let lemmas: Vec<LemmaEntry> = enumerate_lemmas(&alpha, &EnumPolicy::new(PolicyKind::Psp, 1))
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(lemmas.len(), 2);
        assert_eq!(lemmas[1].dterm, dnotation::parse("D11").unwrap());
    }

    #[test]
    fn simp_level_two() {
        let alpha = AxiomAssignment::single(&f("CpCqp"));
        let mut policy = EnumPolicy::new(PolicyKind::Psp, 2);
        policy.dedup = Dedup::Variant;
        let target = dnotation::parse("DD111").unwrap();
        // DD111 has the axiom as theorem, so variant dedup drops it.
        let lemmas: Vec<LemmaEntry> = enumerate_lemmas(&alpha, &policy).unwrap().map(|l| l.unwrap()).collect();
        assert!(!lemmas.iter().any(|l| l.dterm == target));
        let m = crate::semantics::mgt(&target, &alpha).unwrap().unwrap();
        assert!(variant(&m, &f("CpCqp")));
    }

    #[test]
    fn axiom_instance_is_level_zero() {
        let alpha = AxiomAssignment::single(&f("CpCqp"));
        let goal = crate::semantics::skolemize(&f("CpCqp"));
        let problem = Problem::new("k", alpha, Some(goal)).unwrap();
        match prove(&problem, &EnumPolicy::default()).unwrap() {
            ProveOutcome::Proved(r) => {
                assert_eq!(r.level, 0);
                assert!(r.dterm.is_prim());
                assert!(r.delta.bindings().is_empty());
                assert_eq!(r.delta.roots(), vec![PrimLabel::new("2")]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_zero_thresholds() {
        let alpha = AxiomAssignment::single(&f("CpCqp"));
        let mut policy = EnumPolicy::default();
        policy.thresholds.max_ft = Some(0);
        assert!(enumerate_lemmas(&alpha, &policy).is_err());
    }
}
