//! Per-subproof property tables for compacted proofs.
//!
//! One row per axiom occurring in the proof and per distinct compound
//! subproof of the root trees. Compound rows follow the post-order of first
//! visit over the root trees, so every row only refers to earlier rows.

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::compacted::CompactedDTerm;
use crate::dterm::{c_gt, DTerm, PrimLabel};
use crate::error::{Error, Result};
use crate::formats::{dnotation, polish};
use crate::levels::{dterms_by_csize, dterms_by_tsize, Measure};
use crate::reduce::{is_regular_with, ReductionKind};
use crate::semantics::{AxiomAssignment, IptTable, MgtCache};
use crate::term::{subsumes, FTerm, TermKind, Var};

/// Structural relation between major and minor premise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsRelation {
    /// Both premises are the same D-term.
    Equal,
    /// The major premise is a strict subterm of the minor premise.
    MajorInMinor,
    /// The minor premise is a strict subterm of the major premise.
    MinorInMajor,
    /// The major premise is strictly smaller in the compaction ordering.
    CLess,
    CGreater,
    None,
}

/// The DS column: a relation plus the primitive premises, e.g. `1◁`, `▷n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsTag {
    pub relation: DsRelation,
    /// Set when the major premise is an axiom.
    pub axiom_major: Option<PrimLabel>,
    /// Set when the minor premise is an axiom or `n`.
    pub prim_minor: Option<PrimLabel>,
}

impl DsTag {
    pub fn n_minor(&self) -> bool {
        self.prim_minor.as_ref().is_some_and(PrimLabel::is_n)
    }
}

impl fmt::Display for DsTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.axiom_major {
            write!(f, "{l}")?;
        }
        f.write_str(match self.relation {
            DsRelation::Equal => "=",
            DsRelation::MajorInMinor => "◁",
            DsRelation::MinorInMajor => "▷",
            DsRelation::CLess => "<c",
            DsRelation::CGreater => ">c",
            DsRelation::None => "none",
        })?;
        if let Some(l) = &self.prim_minor {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// DS of a compound D-term. `n` as minor premise stands for an arbitrary
/// axiom and counts as a strict subterm of the major premise.
pub fn ds_relation(d: &DTerm) -> Result<DsTag> {
    let (a, b) = d.children().ok_or_else(|| Error::NotCompound(d.to_string()))?;
    let relation = if a == b {
        DsRelation::Equal
    } else if b.is_n() || a.has_strict_subterm(b) {
        DsRelation::MinorInMajor
    } else if b.has_strict_subterm(a) {
        DsRelation::MajorInMinor
    } else if c_gt(b, a) {
        DsRelation::CLess
    } else if c_gt(a, b) {
        DsRelation::CGreater
    } else {
        DsRelation::None
    };
    Ok(DsTag {
        relation,
        axiom_major: a.as_prim().cloned(),
        prim_minor: b.as_prim().cloned(),
    })
}

/// Decides theoremhood of a formula; `None` means unknown.
pub trait TheoremOracle: Sync {
    fn is_theorem(&self, f: &FTerm) -> Option<bool>;
}

/// Two-valued truth tables for the classical implicational fragment.
#[derive(Debug, Clone, Copy, Default)]
pub struct TruthTableOracle;

impl TheoremOracle for TruthTableOracle {
    fn is_theorem(&self, f: &FTerm) -> Option<bool> {
        is_tautology(f).ok()
    }
}

/// Most variables a truth table is built for.
pub const MAX_TAUTOLOGY_VARS: usize = 24;

/// Whether `f`, built from `i` and variables, is a classical tautology.
pub fn is_tautology(f: &FTerm) -> Result<bool> {
    let vars = f.vars();
    if vars.len() > MAX_TAUTOLOGY_VARS {
        return Err(Error::ResourceLimit(format!("{} variables in truth table", vars.len())));
    }
    let index: HashMap<&Var, usize> = vars.iter().enumerate().map(|(k, v)| (v, k)).collect();
    // Compile to postfix so each row is a cheap stack evaluation.
    enum Op {
        Var(usize),
        Imp,
    }
    let mut code = Vec::new();
    let mut stack = vec![(f, false)];
    while let Some((t, done)) = stack.pop() {
        match t.kind() {
            TermKind::Var(v) => code.push(Op::Var(index[v])),
            TermKind::App(_, _) if done => code.push(Op::Imp),
            TermKind::App(..) => {
                let (a, b) = t.as_imp().ok_or_else(|| Error::NonImplicational(polish::print_polish(f)))?;
                stack.push((t, true));
                stack.push((b, false));
                stack.push((a, false));
            }
            TermKind::Const(_) => return Err(Error::NonImplicational(polish::print_polish(f))),
        }
    }
    let mut vals: Vec<bool> = Vec::with_capacity(code.len());
    for row in 0u64..(1u64 << vars.len()) {
        vals.clear();
        for op in &code {
            match op {
                Op::Var(k) => vals.push(row >> k & 1 == 1),
                Op::Imp => {
                    let b = vals.pop().expect("operand");
                    let a = vals.pop().expect("operand");
                    vals.push(!a || b);
                }
            }
        }
        if !vals[0] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Organic {
    Organic,
    WeaklyOrganic,
    Neither,
    Undetermined,
}

impl fmt::Display for Organic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Organic::Organic => "organic",
            Organic::WeaklyOrganic => "weakly-organic",
            Organic::Neither => "neither",
            Organic::Undetermined => "undetermined",
        })
    }
}

fn strict_subterms(f: &FTerm) -> Vec<FTerm> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<FTerm> = f.args().to_vec();
    while let Some(t) = stack.pop() {
        if seen.insert(t.clone()) {
            stack.extend(t.args().iter().cloned());
            out.push(t);
        }
    }
    out
}

fn organic_with(f: &FTerm, oracle: &dyn TheoremOracle) -> Option<bool> {
    let mut unknown = false;
    for s in strict_subterms(f) {
        if s.is_var() {
            continue;
        }
        match oracle.is_theorem(&s) {
            Some(true) => return Some(false),
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown {
        None
    } else {
        Some(true)
    }
}

/// Organic status under classical truth tables.
pub fn organic_status(f: &FTerm) -> Result<Organic> {
    if !is_tautology(f)? {
        return Err(Error::NotATheorem(polish::print_polish(f)));
    }
    Ok(organic_status_with(f, &TruthTableOracle))
}

/// Organic status under a pluggable oracle; `f` is assumed to be a theorem.
pub fn organic_status_with(f: &FTerm, oracle: &dyn TheoremOracle) -> Organic {
    match organic_with(f, oracle) {
        Some(true) => return Organic::Organic,
        None => return Organic::Undetermined,
        Some(false) => {}
    }
    if let Some((p, g)) = f.as_imp() {
        if let Some(v) = p.as_var() {
            if !g.contains_var(v) {
                return match organic_with(g, oracle) {
                    Some(true) => Organic::WeaklyOrganic,
                    Some(false) => Organic::Neither,
                    None => Organic::Undetermined,
                };
            }
        }
    }
    Organic::Neither
}

/// An exact value or a closed interval known to contain it; `hi = None`
/// when no upper bound is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Exact(u64),
    Interval(u64, Option<u64>),
}

impl Bound {
    pub fn lo(&self) -> u64 {
        match *self {
            Bound::Exact(v) | Bound::Interval(v, _) => v,
        }
    }

    pub fn hi(&self) -> Option<u64> {
        match *self {
            Bound::Exact(v) => Some(v),
            Bound::Interval(_, h) => h,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Exact(v) => write!(f, "{v}"),
            Bound::Interval(lo, Some(hi)) => write!(f, "[{lo},{hi}]"),
            Bound::Interval(lo, None) => write!(f, "[{lo},∞)"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Exact(v) => s.serialize_u64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// Exhaustive search limits for MC and MT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_csize: usize,
    pub max_tsize: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_csize: 6,
            max_tsize: 9,
        }
    }
}

/// Theorems of all D-terms up to a size, for minimal-proof lookups.
pub struct ProofIndex {
    /// Per size, the distinct theorems (up to variants).
    levels: Vec<Vec<FTerm>>,
}

impl ProofIndex {
    pub fn build(alpha: &AxiomAssignment, measure: Measure, max: usize) -> Result<Self> {
        let prims: Vec<PrimLabel> = alpha.labels().cloned().collect();
        let terms = match measure {
            Measure::CSize => dterms_by_csize(max, &prims)?,
            Measure::TSize => dterms_by_tsize(max, &prims),
            other => return Err(Error::InvalidProblem(format!("no minimal-proof search by {other}"))),
        };
        let mut cache = MgtCache::new(alpha);
        let mut seen: HashSet<FTerm> = HashSet::new();
        let mut levels = Vec::with_capacity(terms.len());
        for level in terms {
            let mut out = Vec::new();
            for d in level {
                if let Some(m) = cache.mgt(&d)? {
                    let m = m.canonical();
                    if seen.insert(m.clone()) {
                        out.push(m);
                    }
                }
            }
            levels.push(out);
        }
        Ok(ProofIndex { levels })
    }

    pub fn max(&self) -> usize {
        self.levels.len() - 1
    }

    /// Smallest size of a proof whose theorem subsumes `goal`.
    pub fn smallest(&self, goal: &FTerm) -> Option<usize> {
        self.levels
            .iter()
            .position(|level| level.iter().any(|m| subsumes(m, goal)))
    }

    /// Exact if found within the index, else `[max + 1, known]`.
    pub fn bound(&self, goal: &FTerm, known: Option<u64>) -> Bound {
        match self.smallest(goal) {
            Some(n) => Bound::Exact(n as u64),
            None => Bound::Interval(self.max() as u64 + 1, known),
        }
    }
}

/// Minimal size of a proof of `goal` by exhaustive enumeration up to `max`.
pub fn min_proof_size(
    goal: &FTerm,
    alpha: &AxiomAssignment,
    measure: Measure,
    max: usize,
    known: Option<u64>,
) -> Result<Bound> {
    Ok(ProofIndex::build(alpha, measure, max)?.bound(goal, known))
}

/// A row of the MER, ŁUK and nickname columns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConcordanceEntry {
    pub mer: Option<String>,
    pub luk: Option<String>,
    pub names: Vec<String>,
}

/// Cross references keyed by the canonical theorem.
#[derive(Debug, Clone, Default)]
pub struct Concordance {
    entries: HashMap<FTerm, ConcordanceEntry>,
    nicknames: IndexMap<String, (FTerm, Vec<String>)>,
}

pub const NICKNAMES_SRC: &str = include_str!("../data/nicknames.txt");

impl Concordance {
    pub fn new() -> Self {
        Self::default()
    }

    /// Cross references from the two historical proofs and the nickname table.
    pub fn standard() -> Self {
        let mut c = Concordance::new();
        c.add_proof(&crate::data::meredith(), "M", |e| &mut e.mer);
        c.add_proof(&crate::data::lukasiewicz(), "Ł", |e| &mut e.luk);
        c.add_nicknames(NICKNAMES_SRC).expect("bundled nicknames parse");
        c
    }

    fn add_proof(
        &mut self,
        corpus: &crate::formats::corpus::Corpus,
        prefix: &str,
        slot: fn(&mut ConcordanceEntry) -> &mut Option<String>,
    ) {
        let mut add = |f: &FTerm, l: &PrimLabel| {
            let e = self.entries.entry(f.canonical()).or_default();
            let s = slot(e);
            if s.is_none() {
                *s = Some(format!("{prefix}{l}"));
            }
        };
        for l in corpus.axioms.labels() {
            add(corpus.axioms.formula(l).expect("axiom"), l);
        }
        let mgts = crate::semantics::lemma_mgts(&corpus.proof, &corpus.axioms).expect("bundled proof");
        for (l, m) in mgts {
            if let Some(m) = m {
                add(&m, &l);
            }
        }
    }

    /// Lines `Nk <Polish formula> name, name, ...`.
    pub fn add_nicknames(&mut self, src: &str) -> Result<()> {
        for line in src.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, char::is_whitespace);
            let id = parts.next().unwrap_or_default().to_string();
            let f = polish::parse_polish(parts.next().unwrap_or_default(), &HashSet::new())?;
            let names: Vec<String> = parts
                .next()
                .unwrap_or_default()
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            self.entries.entry(f.canonical()).or_default().names.push(id.clone());
            self.nicknames.insert(id, (f.canonical(), names));
        }
        Ok(())
    }

    pub fn get(&self, f: &FTerm) -> Option<&ConcordanceEntry> {
        self.entries.get(&f.canonical())
    }

    /// Nickname ids with their formulas and names.
    pub fn nicknames(&self) -> impl Iterator<Item = (&String, &(FTerm, Vec<String>))> {
        self.nicknames.iter()
    }
}

/// One row of the property table. Field names are the column names.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyRow {
    #[serde(rename = "row")]
    pub index: usize,
    /// Label of the row in the compacted proof, if it has one.
    pub label: Option<String>,
    /// D-notation with earlier rows referenced by row number.
    pub dterm: String,
    #[serde(skip)]
    pub subproof: DTerm,
    #[serde(skip)]
    pub mgt: FTerm,
    pub formula: String,
    #[serde(rename = "MER")]
    pub mer: Option<String>,
    #[serde(rename = "ŁUK")]
    pub luk: Option<String>,
    #[serde(rename = "NN")]
    pub nn: Option<String>,
    #[serde(rename = "DC")]
    pub dc: usize,
    #[serde(rename = "DT")]
    pub dt: u64,
    #[serde(rename = "DH")]
    pub dh: u32,
    #[serde(rename = "DX")]
    pub dx: u64,
    #[serde(rename = "DI")]
    pub di: u64,
    #[serde(rename = "DR")]
    pub dr: u64,
    #[serde(rename = "DS", serialize_with = "ser_display_opt")]
    pub ds: Option<DsTag>,
    #[serde(rename = "DP")]
    pub dp: bool,
    #[serde(rename = "DK_L")]
    pub dk_l: u32,
    #[serde(rename = "DK_R")]
    pub dk_r: u32,
    #[serde(rename = "FC")]
    pub fc: usize,
    #[serde(rename = "FT")]
    pub ft: u64,
    #[serde(rename = "FH")]
    pub fh: u32,
    #[serde(rename = "FV")]
    pub fv: usize,
    #[serde(rename = "FO")]
    pub fo: Organic,
    #[serde(rename = "MC")]
    pub mc: Bound,
    #[serde(rename = "MT")]
    pub mt: Bound,
    #[serde(rename = "RS")]
    pub rs: bool,
    #[serde(rename = "RC")]
    pub rc: bool,
    #[serde(rename = "IT_U")]
    pub it_u: u64,
    #[serde(rename = "IT_M")]
    pub it_m: u64,
    #[serde(rename = "IH_U")]
    pub ih_u: u64,
    #[serde(rename = "IH_M")]
    pub ih_m: u64,
}

fn ser_display_opt<T: fmt::Display, S: Serializer>(v: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Rounded median: the middle value, or the mean of the two middle values
/// rounded half up.
pub fn rounded_median(values: &mut [u64]) -> u64 {
    if values.is_empty() {
        return 0;
    }
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]).div_ceil(2)
    }
}

/// IPT tree sizes and heights of every occurrence of every subterm in the
/// root trees. Axiom leaves are included, `n` leaves are not.
struct Occurrences {
    stats: HashMap<DTerm, (Vec<u64>, Vec<u64>)>,
}

impl Occurrences {
    fn new(roots: &[DTerm], alpha: &AxiomAssignment) -> Result<Self> {
        let per_root: Vec<Result<Vec<(DTerm, u64, u64)>>> = roots
            .par_iter()
            .map(|r| {
                let table = IptTable::new(r, alpha)?.ok_or_else(|| Error::UndefinedMgt(r.to_string()))?;
                Ok(r.positioned_subterms()
                    .into_iter()
                    .filter(|(_, t)| !t.is_n())
                    .map(|(p, t)| {
                        let f = table.get(&p).expect("position");
                        (t, f.tree_size(), f.height() as u64)
                    })
                    .collect())
            })
            .collect();
        let mut stats: HashMap<DTerm, (Vec<u64>, Vec<u64>)> = HashMap::new();
        for r in per_root {
            for (t, ts, h) in r? {
                let e = stats.entry(t).or_default();
                e.0.push(ts);
                e.1.push(h);
            }
        }
        Ok(Occurrences { stats })
    }

    fn summary(&self, e: &DTerm) -> (u64, u64, u64, u64) {
        match self.stats.get(e) {
            None => (0, 0, 0, 0),
            Some((ts, hs)) => {
                let (mut ts, mut hs) = (ts.clone(), hs.clone());
                let tu = ts.iter().copied().max().unwrap_or(0);
                let hu = hs.iter().copied().max().unwrap_or(0);
                (tu, rounded_median(&mut ts), hu, rounded_median(&mut hs))
            }
        }
    }
}

/// `(IT_U, IT_M, IH_U, IH_M)` of a label of `delta` or of an axiom.
pub fn ipt_stats(delta: &CompactedDTerm, alpha: &AxiomAssignment, label: &PrimLabel) -> Result<(u64, u64, u64, u64)> {
    let roots: Vec<DTerm> = delta.expanded_roots()?.into_iter().map(|r| r.1).collect();
    let e = if delta.is_bound(label) || delta.aliases().contains_key(label) {
        delta.expand(label)?
    } else if alpha.contains(label) {
        DTerm::prim(label.clone())
    } else {
        return Err(Error::UnknownLabel(label.to_string()));
    };
    Ok(Occurrences::new(&roots, alpha)?.summary(&e))
}

/// `(RS, RC)` of a label of `delta`.
pub fn regularity(delta: &CompactedDTerm, alpha: &AxiomAssignment, label: &PrimLabel) -> Result<(bool, bool)> {
    let d = if alpha.contains(label) && !delta.is_bound(label) {
        DTerm::prim(label.clone())
    } else {
        delta.expand(label)?
    };
    let mut cache = MgtCache::new(alpha);
    Ok((
        is_regular_with(&d, alpha, ReductionKind::S, &mut cache)?,
        is_regular_with(&d, alpha, ReductionKind::C, &mut cache)?,
    ))
}

/// Options for [`analyze`].
pub struct AnalysisOptions<'a> {
    pub budget: Budget,
    pub concordance: Option<&'a Concordance>,
    pub oracle: &'a dyn TheoremOracle,
    /// Skip the regularity columns (they report `true`).
    pub skip_regularity: bool,
}

impl Default for AnalysisOptions<'_> {
    fn default() -> Self {
        AnalysisOptions {
            budget: Budget::default(),
            concordance: None,
            oracle: &TruthTableOracle,
            skip_regularity: false,
        }
    }
}

/// Distinct subterms of the root trees: axioms first, then compound
/// subterms in post-order of first visit.
pub fn row_subterms(roots: &[DTerm], alpha: &AxiomAssignment) -> Vec<DTerm> {
    let mut seen = HashSet::new();
    let mut compound = Vec::new();
    let mut used_prims = HashSet::new();
    for r in roots {
        for t in r.subterms() {
            match t.as_prim() {
                Some(l) => {
                    used_prims.insert(l.clone());
                }
                None => {
                    if seen.insert(t.clone()) {
                        compound.push(t);
                    }
                }
            }
        }
    }
    let mut out: Vec<DTerm> = alpha
        .labels()
        .filter(|l| used_prims.contains(*l))
        .map(|l| DTerm::prim(l.clone()))
        .collect();
    out.extend(compound);
    out
}

/// The property table of a compacted proof.
pub fn analyze(delta: &CompactedDTerm, alpha: &AxiomAssignment, opts: &AnalysisOptions) -> Result<Vec<PropertyRow>> {
    let expanded = delta.expanded_roots()?;
    let roots: Vec<DTerm> = expanded.iter().map(|r| r.1.clone()).collect();
    let rows = row_subterms(&roots, alpha);
    let index: HashMap<DTerm, usize> = rows.iter().enumerate().map(|(k, t)| (t.clone(), k + 1)).collect();
    let mut labels: HashMap<DTerm, String> = HashMap::new();
    for (l, d) in delta.expand_all()? {
        labels.entry(d).or_insert_with(|| l.to_string());
    }

    // DI: edges of the minimal DAG. DR: occurrences in the root trees.
    let mut di: HashMap<DTerm, u64> = HashMap::new();
    let mut dr: HashMap<DTerm, u64> = HashMap::new();
    for t in rows.iter().filter(|t| t.is_compound()) {
        let (a, b) = t.children().expect("compound");
        *di.entry(a.clone()).or_insert(0) += 1;
        *di.entry(b.clone()).or_insert(0) += 1;
    }
    for r in &roots {
        let nodes = r.subterms();
        let mut mult: HashMap<DTerm, u64> = HashMap::new();
        mult.insert(r.clone(), 1);
        for t in nodes.iter().rev() {
            let m = mult.get(t).copied().unwrap_or(0);
            if let Some((a, b)) = t.children() {
                *mult.entry(a.clone()).or_insert(0) += m;
                *mult.entry(b.clone()).or_insert(0) += m;
            }
        }
        for (t, m) in mult {
            *dr.entry(t).or_insert(0) += m;
        }
    }

    let mut cache = MgtCache::new(alpha);
    let mut mgts = Vec::with_capacity(rows.len());
    for t in &rows {
        mgts.push(cache.mgt(t)?.ok_or_else(|| Error::UndefinedMgt(t.to_string()))?);
    }
    let occurrences = Occurrences::new(&roots, alpha)?;
    let (mc_index, mt_index) = rayon::join(
        || ProofIndex::build(alpha, Measure::CSize, opts.budget.max_csize),
        || ProofIndex::build(alpha, Measure::TSize, opts.budget.max_tsize),
    );
    let (mc_index, mt_index) = (mc_index?, mt_index?);

    let reference = |t: &DTerm| -> DTerm {
        match t.as_prim() {
            Some(l) if l.is_n() => t.clone(),
            _ => DTerm::prim(PrimLabel::from(index[t] as u32)),
        }
    };

    rows.par_iter()
        .zip(mgts.par_iter())
        .enumerate()
        .map(|(k, (t, m))| -> Result<PropertyRow> {
            let mut cache = MgtCache::new(alpha);
            let (dterm, ds) = match t.children() {
                Some((a, b)) => (
                    dnotation::print(&DTerm::d(&reference(a), &reference(b))),
                    Some(ds_relation(t)?),
                ),
                None => (t.to_string(), None),
            };
            let (rs, rc) = if opts.skip_regularity || t.is_prim() {
                (true, true)
            } else {
                (
                    is_regular_with(t, alpha, ReductionKind::S, &mut cache)?,
                    is_regular_with(t, alpha, ReductionKind::C, &mut cache)?,
                )
            };
            let entry = opts.concordance.and_then(|c| c.get(m)).cloned().unwrap_or_default();
            let (it_u, it_m, ih_u, ih_m) = occurrences.summary(t);
            let (kl, kr) = t.successive_heights();
            let fo = match opts.oracle.is_theorem(m) {
                Some(true) => organic_status_with(m, opts.oracle),
                Some(false) => Organic::Neither,
                None => Organic::Undetermined,
            };
            Ok(PropertyRow {
                index: k + 1,
                label: labels.get(t).cloned().or_else(|| t.as_prim().map(|l| l.to_string())),
                dterm,
                subproof: t.clone(),
                mgt: m.clone(),
                formula: polish::print_polish(m),
                mer: entry.mer,
                luk: entry.luk,
                nn: (!entry.names.is_empty()).then(|| entry.names.join(",")),
                dc: t.c_size(),
                dt: t.t_size(),
                dh: t.height(),
                dx: t.sc_size(),
                di: di.get(t).copied().unwrap_or(0),
                dr: dr.get(t).copied().unwrap_or(0),
                ds,
                dp: t.is_prime(),
                dk_l: kl,
                dk_r: kr,
                fc: m.compacted_size(),
                ft: m.tree_size(),
                fh: m.height(),
                fv: m.vars().len(),
                fo,
                mc: mc_index.bound(m, Some(t.c_size() as u64)),
                mt: mt_index.bound(m, Some(t.t_size())),
                rs,
                rc,
                it_u,
                it_m,
                ih_u,
                ih_m,
            })
        })
        .collect()
}

/// CSV with one header line of column names.
pub fn to_csv(rows: &[PropertyRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidProblem(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidProblem(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is UTF-8"))
}

pub fn to_json(rows: &[PropertyRow]) -> serde_json::Value {
    serde_json::to_value(rows).expect("rows serialize")
}

/// A fixed-width text table.
pub fn to_text(rows: &[PropertyRow]) -> String {
    let header = [
        "row", "dterm", "MER", "ŁUK", "NN", "DC", "DT", "DH", "DX", "DI", "DR", "DS", "DP", "DK_L", "DK_R", "FC",
        "FT", "FH", "FV", "FO", "MC", "MT", "RS", "RC", "IT_U", "IT_M", "IH_U", "IH_M",
    ];
    let flag = |b: bool| if b { "•".to_string() } else { "-".to_string() };
    let opt = |s: &Option<String>| s.clone().unwrap_or_default();
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in rows {
        table.push(vec![
            format!("{}.", r.index),
            r.dterm.clone(),
            opt(&r.mer),
            opt(&r.luk),
            opt(&r.nn),
            r.dc.to_string(),
            r.dt.to_string(),
            r.dh.to_string(),
            r.dx.to_string(),
            r.di.to_string(),
            r.dr.to_string(),
            r.ds.as_ref().map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
            flag(r.dp),
            r.dk_l.to_string(),
            r.dk_r.to_string(),
            r.fc.to_string(),
            r.ft.to_string(),
            r.fh.to_string(),
            r.fv.to_string(),
            match r.fo {
                Organic::Organic => "•".into(),
                Organic::WeaklyOrganic => "◦".into(),
                Organic::Neither => "-".into(),
                Organic::Undetermined => "?".into(),
            },
            r.mc.to_string(),
            r.mt.to_string(),
            flag(r.rs),
            flag(r.rc),
            r.it_u.to_string(),
            r.it_m.to_string(),
            r.ih_u.to_string(),
            r.ih_m.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in table {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        out.push_str(cells.join(" ").trim_end());
        out.push('\n');
    }
    out
}
