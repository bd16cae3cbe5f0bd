//! First-order terms with positions, substitutions, unification and subsumption.
//!
//! Terms are immutable and reference counted, so subterms are shared freely.
//! Every node caches its hash, tree size and height, which keeps the size
//! measures constant-time even for terms whose tree form is very large.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::error::{Error, Result};

/// Dewey-notation path into a tree. The empty path is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position(Arc<[u32]>);

impl Position {
    pub fn root() -> Self {
        Position(Arc::from(Vec::new()))
    }

    pub fn from_slice(path: &[u32]) -> Self {
        Position(Arc::from(path))
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// `p.i`
    pub fn child(&self, i: u32) -> Position {
        let mut v = self.0.to_vec();
        v.push(i);
        Position(v.into())
    }

    /// `p.q`
    pub fn concat(&self, q: &Position) -> Position {
        if q.is_root() {
            return self.clone();
        }
        if self.is_root() {
            return q.clone();
        }
        let mut v = self.0.to_vec();
        v.extend_from_slice(&q.0);
        Position(v.into())
    }

    /// Prefix order `p ≤ q`.
    pub fn is_prefix_of(&self, q: &Position) -> bool {
        q.0.starts_with(&self.0)
    }

    /// Strict prefix order `p < q`.
    pub fn is_strict_prefix_of(&self, q: &Position) -> bool {
        self.0.len() < q.0.len() && self.is_prefix_of(q)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Position {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" {
            return Ok(Position::root());
        }
        let path = s
            .split('.')
            .map(str::parse)
            .collect::<std::result::Result<Vec<u32>, _>>()?;
        Ok(Position(path.into()))
    }
}

/// A variable.
///
/// `Num` variables are the canonical ones and print as `p, q, r, s, t, u, v, w,
/// v1, v2, ...`. `Y` and `X` are the positional variables `y_p` and `x_p^i`
/// used for proof-structure semantics.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Num(u32),
    Name(Arc<str>),
    Y(Position),
    X(Position, u32),
}

const LETTERS: [&str; 8] = ["p", "q", "r", "s", "t", "u", "v", "w"];

impl Var {
    /// The canonical variable name for index `k` (1-based).
    pub fn canonical_name(k: u32) -> String {
        if (1..=8).contains(&k) {
            LETTERS[k as usize - 1].to_string()
        } else {
            format!("v{}", k.saturating_sub(8))
        }
    }

    /// Inverse of [`Var::canonical_name`]; other names become `Var::Name`.
    pub fn from_name(name: &str) -> Var {
        if let Some(k) = LETTERS.iter().position(|l| *l == name) {
            return Var::Num(k as u32 + 1);
        }
        if let Some(digits) = name.strip_prefix('v') {
            if !digits.is_empty() && !digits.starts_with('0') && digits.bytes().all(|b| b.is_ascii_digit()) {
                if let Ok(k) = digits.parse::<u32>() {
                    return Var::Num(k + 8);
                }
            }
        }
        Var::Name(Arc::from(name))
    }

    pub fn is_positional(&self) -> bool {
        matches!(self, Var::Y(_) | Var::X(..))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Num(k) => f.write_str(&Var::canonical_name(*k)),
            Var::Name(n) => f.write_str(n),
            Var::Y(p) => write!(f, "y_{p}"),
            Var::X(p, i) => write!(f, "x_{p}^{i}"),
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Function or constant symbol.
#[derive(Clone)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(name: &str) -> Sym {
        if name == "i" {
            return Sym::imp();
        }
        Sym(Arc::from(name))
    }

    /// The binary implication symbol `i`.
    pub fn imp() -> Sym {
        static IMP: OnceLock<Arc<str>> = OnceLock::new();
        Sym(IMP.get_or_init(|| Arc::from("i")).clone())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Sym {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Sym {}

impl Hash for Sym {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl PartialOrd for Sym {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Sym {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub enum TermKind {
    Var(Var),
    Const(Sym),
    App(Sym, Box<[FTerm]>),
}

struct Node {
    kind: TermKind,
    hash: u64,
    size: u64,
    height: u32,
}

/// An immutable first-order term.
#[derive(Clone)]
pub struct FTerm(Arc<Node>);

fn mix(a: u64, b: u64) -> u64 {
    (a.rotate_left(5) ^ b).wrapping_mul(0x517c_c1b7_2722_0a95)
}

fn std_hash<T: Hash + ?Sized>(x: &T) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

impl FTerm {
    pub fn var(v: Var) -> FTerm {
        let hash = mix(1, std_hash(&v));
        FTerm(Arc::new(Node {
            kind: TermKind::Var(v),
            hash,
            size: 0,
            height: 0,
        }))
    }

    pub fn num(k: u32) -> FTerm {
        FTerm::var(Var::Num(k))
    }

    pub fn constant(name: &str) -> FTerm {
        let sym = Sym::new(name);
        let hash = mix(2, std_hash(&sym));
        FTerm(Arc::new(Node {
            kind: TermKind::Const(sym),
            hash,
            size: 0,
            height: 0,
        }))
    }

    /// Application of `f` to `args`. With no arguments this is a constant.
    pub fn app(f: Sym, args: Vec<FTerm>) -> FTerm {
        if args.is_empty() {
            let hash = mix(2, std_hash(&f));
            return FTerm(Arc::new(Node {
                kind: TermKind::Const(f),
                hash,
                size: 0,
                height: 0,
            }));
        }
        let mut hash = mix(3, std_hash(&f));
        let mut size: u64 = 1;
        let mut height = 0;
        for a in &args {
            hash = mix(hash, a.0.hash);
            size = size.saturating_add(a.0.size);
            height = height.max(a.0.height + 1);
        }
        FTerm(Arc::new(Node {
            kind: TermKind::App(f, args.into_boxed_slice()),
            hash,
            size,
            height,
        }))
    }

    /// `i(a, b)`
    pub fn imp(a: FTerm, b: FTerm) -> FTerm {
        FTerm::app(Sym::imp(), vec![a, b])
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn as_var(&self) -> Option<&Var> {
        match &self.0.kind {
            TermKind::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        self.as_var().is_some()
    }

    pub fn args(&self) -> &[FTerm] {
        match &self.0.kind {
            TermKind::App(_, a) => a,
            _ => &[],
        }
    }

    pub fn functor(&self) -> Option<&Sym> {
        match &self.0.kind {
            TermKind::App(f, _) => Some(f),
            TermKind::Const(c) => Some(c),
            TermKind::Var(_) => None,
        }
    }

    /// The two arguments if this is `i(a, b)`.
    pub fn as_imp(&self) -> Option<(&FTerm, &FTerm)> {
        match &self.0.kind {
            TermKind::App(f, a) if a.len() == 2 && *f == Sym::imp() => Some((&a[0], &a[1])),
            _ => None,
        }
    }

    pub fn ptr_eq(&self, other: &FTerm) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Number of occurrences of function symbols with positive arity.
    pub fn tree_size(&self) -> u64 {
        self.0.size
    }

    /// Edges on the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        self.0.height
    }

    /// Number of distinct compound subterms.
    pub fn compacted_size(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            if let TermKind::App(_, args) = &t.0.kind {
                if seen.insert(t.clone()) {
                    stack.extend(args.iter().cloned());
                }
            }
        }
        seen.len()
    }

    /// Variables in order of first occurrence (left to right).
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut visited = HashSet::new();
        self.collect_vars(&mut out, &mut seen, &mut visited);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>, seen: &mut HashSet<Var>, visited: &mut HashSet<usize>) {
        match &self.0.kind {
            TermKind::Var(v) => {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
            TermKind::Const(_) => {}
            TermKind::App(_, args) => {
                if self.0.size > 8 && !visited.insert(self.addr()) {
                    return;
                }
                for a in args.iter() {
                    a.collect_vars(out, seen, visited);
                }
            }
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        let mut visited = HashSet::new();
        self.contains_var_memo(v, &mut visited)
    }

    fn contains_var_memo(&self, v: &Var, visited: &mut HashSet<usize>) -> bool {
        match &self.0.kind {
            TermKind::Var(w) => w == v,
            TermKind::Const(_) => false,
            TermKind::App(_, args) => {
                if self.0.size > 8 && !visited.insert(self.addr()) {
                    return false;
                }
                args.iter().any(|a| a.contains_var_memo(v, visited))
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    /// All positions in pre-order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.positions_into(&mut path, &mut out);
        out
    }

    fn positions_into(&self, path: &mut Vec<u32>, out: &mut Vec<Position>) {
        out.push(Position::from_slice(path));
        for (k, a) in self.args().iter().enumerate() {
            path.push(k as u32 + 1);
            a.positions_into(path, out);
            path.pop();
        }
    }

    pub fn subterm_at(&self, p: &Position) -> Result<FTerm> {
        let mut t = self;
        for &i in p.path() {
            t = t
                .args()
                .get((i as usize).wrapping_sub(1))
                .ok_or_else(|| Error::PositionOutOfRange(p.clone()))?;
        }
        Ok(t.clone())
    }

    /// `s[u]_p`
    pub fn replace_at(&self, p: &Position, u: FTerm) -> Result<FTerm> {
        fn go(t: &FTerm, path: &[u32], u: FTerm, p: &Position) -> Result<FTerm> {
            let Some((&i, rest)) = path.split_first() else {
                return Ok(u);
            };
            let TermKind::App(f, args) = &t.0.kind else {
                return Err(Error::PositionOutOfRange(p.clone()));
            };
            let k = (i as usize).wrapping_sub(1);
            if k >= args.len() {
                return Err(Error::PositionOutOfRange(p.clone()));
            }
            let mut new_args = args.to_vec();
            new_args[k] = go(&args[k], rest, u, p)?;
            Ok(FTerm::app(f.clone(), new_args))
        }
        go(self, p.path(), u, p)
    }

    /// Rename variables to `Num(1), Num(2), ...` by first occurrence.
    pub fn canonical(&self) -> FTerm {
        let vars = self.vars();
        if vars.iter().enumerate().all(|(k, v)| *v == Var::Num(k as u32 + 1)) {
            return self.clone();
        }
        let map: HashMap<Var, FTerm> = vars
            .into_iter()
            .enumerate()
            .map(|(k, v)| (v, FTerm::num(k as u32 + 1)))
            .collect();
        self.map_vars(&|v| map.get(v).cloned())
    }

    /// Add `offset` to every `Num` variable.
    pub fn shift_nums(&self, offset: u32) -> FTerm {
        if offset == 0 {
            return self.clone();
        }
        self.map_vars(&|v| match v {
            Var::Num(k) => Some(FTerm::num(k + offset)),
            _ => None,
        })
    }

    /// Largest `Num` index occurring, or 0.
    pub fn max_num(&self) -> u32 {
        self.vars()
            .iter()
            .filter_map(|v| match v {
                Var::Num(k) => Some(*k),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Replace variables for which `f` returns a term. Shared subterms are
    /// rewritten once.
    pub fn map_vars(&self, f: &dyn Fn(&Var) -> Option<FTerm>) -> FTerm {
        let mut memo = HashMap::new();
        self.map_vars_memo(f, &mut memo)
    }

    fn map_vars_memo(&self, f: &dyn Fn(&Var) -> Option<FTerm>, memo: &mut HashMap<usize, FTerm>) -> FTerm {
        match &self.0.kind {
            TermKind::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            TermKind::Const(_) => self.clone(),
            TermKind::App(sym, args) => {
                if let Some(t) = memo.get(&self.addr()) {
                    return t.clone();
                }
                let new_args: Vec<FTerm> = args.iter().map(|a| a.map_vars_memo(f, memo)).collect();
                let t = if new_args.iter().zip(args.iter()).all(|(a, b)| a.ptr_eq(b)) {
                    self.clone()
                } else {
                    FTerm::app(sym.clone(), new_args)
                };
                memo.insert(self.addr(), t.clone());
                t
            }
        }
    }

    fn structural_eq(&self, other: &FTerm) -> bool {
        match (&self.0.kind, &other.0.kind) {
            (TermKind::Var(a), TermKind::Var(b)) => a == b,
            (TermKind::Const(a), TermKind::Const(b)) => a == b,
            (TermKind::App(f, a), TermKind::App(g, b)) => {
                f == g && a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x == y)
            }
            _ => false,
        }
    }
}

impl PartialEq for FTerm {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.height == other.0.height
                && self.structural_eq(other))
    }
}
impl Eq for FTerm {}

impl Hash for FTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl PartialOrd for FTerm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FTerm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        if self.ptr_eq(other) {
            return Equal;
        }
        let rank = |k: &TermKind| match k {
            TermKind::Var(_) => 0,
            TermKind::Const(_) => 1,
            TermKind::App(..) => 2,
        };
        match (&self.0.kind, &other.0.kind) {
            (TermKind::Var(a), TermKind::Var(b)) => a.cmp(b),
            (TermKind::Const(a), TermKind::Const(b)) => a.cmp(b),
            (TermKind::App(f, a), TermKind::App(g, b)) => f.cmp(g).then_with(|| a.iter().cmp(b.iter())),
            (a, b) => rank(a).cmp(&rank(b)),
        }
    }
}

impl fmt::Display for FTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            TermKind::Var(v) => write!(f, "{v}"),
            TermKind::Const(c) => write!(f, "{c}"),
            TermKind::App(s, args) => {
                write!(f, "{s}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for FTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite set of unordered term pairs; each pair is stored with the
/// smaller term first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermPairSet(std::collections::BTreeSet<(FTerm, FTerm)>);

impl TermPairSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: FTerm, b: FTerm) {
        if a <= b {
            self.0.insert((a, b));
        } else {
            self.0.insert((b, a));
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(FTerm, FTerm)> {
        self.0.iter()
    }
}

impl FromIterator<(FTerm, FTerm)> for TermPairSet {
    fn from_iter<I: IntoIterator<Item = (FTerm, FTerm)>>(iter: I) -> Self {
        let mut s = TermPairSet::new();
        for (a, b) in iter {
            s.insert(a, b);
        }
        s
    }
}

/// Finite mapping from variables to terms. Identity bindings are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<Var, FTerm>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, v: Var, t: FTerm) {
        if t.as_var() == Some(&v) {
            self.0.remove(&v);
        } else {
            self.0.insert(v, t);
        }
    }

    pub fn get(&self, v: &Var) -> Option<&FTerm> {
        self.0.get(v)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &FTerm)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `tσ`
    pub fn apply(&self, t: &FTerm) -> FTerm {
        if self.0.is_empty() {
            return t.clone();
        }
        t.map_vars(&|v| self.0.get(v).cloned())
    }

    /// `σθ`, the substitution applying `self` first and then `theta`.
    pub fn compose(&self, theta: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (v, t) in &self.0 {
            out.bind(v.clone(), theta.apply(t));
        }
        for (v, t) in &theta.0 {
            if !self.0.contains_key(v) {
                out.bind(v.clone(), t.clone());
            }
        }
        out
    }

    /// `σ` is idempotent iff no range term mentions a domain variable.
    pub fn is_idempotent(&self) -> bool {
        self.0
            .values()
            .all(|t| t.vars().iter().all(|v| !self.0.contains_key(v)))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (v, t)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Unification failed: a symbol clash or an occurs-check failure.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("terms are not unifiable")]
pub struct NotUnifiable;

/// Incremental syntactic unification with occurs check.
///
/// Bindings are kept in triangular form; [`Unifier::resolve`] applies the
/// solved form, sharing rewritten subterms.
#[derive(Default)]
pub struct Unifier {
    bindings: HashMap<Var, FTerm>,
    resolved: HashMap<usize, FTerm>,
    visited: HashSet<usize>,
}

impl Unifier {
    pub fn new() -> Self {
        Self::default()
    }

    fn walk(&self, t: &FTerm) -> FTerm {
        let mut t = t.clone();
        while let TermKind::Var(v) = &t.0.kind {
            match self.bindings.get(v) {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn occurs(&mut self, v: &Var, t: &FTerm) -> bool {
        self.visited.clear();
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            match &t.0.kind {
                TermKind::Var(w) => {
                    if w == v {
                        return true;
                    }
                    if let Some(u) = self.bindings.get(w) {
                        stack.push(u.clone());
                    }
                }
                TermKind::Const(_) => {}
                TermKind::App(_, args) => {
                    if self.visited.insert(t.addr()) {
                        stack.extend(args.iter().cloned());
                    }
                }
            }
        }
        false
    }

    /// Add the equation `a = b`. On failure the unifier must be discarded.
    pub fn unify(&mut self, a: &FTerm, b: &FTerm) -> std::result::Result<(), NotUnifiable> {
        self.resolved.clear();
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((a, b)) = stack.pop() {
            let a = self.walk(&a);
            let b = self.walk(&b);
            if a.ptr_eq(&b) {
                continue;
            }
            match (&a.0.kind, &b.0.kind) {
                (TermKind::Var(x), TermKind::Var(y)) => {
                    if x != y {
                        self.bindings.insert(x.clone(), b.clone());
                    }
                }
                (TermKind::Var(x), _) => {
                    if self.occurs(x, &b) {
                        return Err(NotUnifiable);
                    }
                    self.bindings.insert(x.clone(), b.clone());
                }
                (_, TermKind::Var(y)) => {
                    if self.occurs(y, &a) {
                        return Err(NotUnifiable);
                    }
                    self.bindings.insert(y.clone(), a.clone());
                }
                (TermKind::Const(f), TermKind::Const(g)) => {
                    if f != g {
                        return Err(NotUnifiable);
                    }
                }
                (TermKind::App(f, xs), TermKind::App(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return Err(NotUnifiable);
                    }
                    for (x, y) in xs.iter().zip(ys.iter()).rev() {
                        stack.push((x.clone(), y.clone()));
                    }
                }
                _ => return Err(NotUnifiable),
            }
        }
        Ok(())
    }

    /// Apply the current solution to `t`.
    pub fn resolve(&mut self, t: &FTerm) -> FTerm {
        match &t.0.kind {
            TermKind::Var(v) => match self.bindings.get(v).cloned() {
                Some(u) => self.resolve(&u),
                None => t.clone(),
            },
            TermKind::Const(_) => t.clone(),
            TermKind::App(f, args) => {
                if let Some(r) = self.resolved.get(&t.addr()) {
                    return r.clone();
                }
                let new_args: Vec<FTerm> = args.iter().map(|a| self.resolve(a)).collect();
                let r = if new_args.iter().zip(args.iter()).all(|(a, b)| a.ptr_eq(b)) {
                    t.clone()
                } else {
                    FTerm::app(f.clone(), new_args)
                };
                self.resolved.insert(t.addr(), r.clone());
                r
            }
        }
    }

    /// The solved form as an idempotent substitution.
    pub fn into_substitution(mut self) -> Substitution {
        let vars: Vec<Var> = self.bindings.keys().cloned().collect();
        let mut s = Substitution::new();
        for v in vars {
            let t = self.resolve(&FTerm::var(v.clone()));
            s.bind(v, t);
        }
        s
    }
}

/// Most general unifier of a set of pairs.
pub fn unify(m: &TermPairSet) -> std::result::Result<Substitution, NotUnifiable> {
    unify_pairs(m.iter().map(|(a, b)| (a, b)))
}

pub fn unify_pairs<'a, I>(pairs: I) -> std::result::Result<Substitution, NotUnifiable>
where
    I: IntoIterator<Item = (&'a FTerm, &'a FTerm)>,
{
    let mut u = Unifier::new();
    for (a, b) in pairs {
        u.unify(a, b)?;
    }
    Ok(u.into_substitution())
}

/// One-sided matching: a `θ` with `pattern θ = target`. Variables of `target`
/// are treated as constants.
pub fn match_term(pattern: &FTerm, target: &FTerm) -> Option<Substitution> {
    let mut binds = HashMap::new();
    if match_into(pattern, target, &mut binds) {
        let mut s = Substitution::new();
        for (v, t) in binds {
            s.bind(v, t);
        }
        Some(s)
    } else {
        None
    }
}

fn match_into(p: &FTerm, t: &FTerm, binds: &mut HashMap<Var, FTerm>) -> bool {
    match &p.0.kind {
        TermKind::Var(v) => match binds.get(v) {
            Some(b) => b == t,
            None => {
                binds.insert(v.clone(), t.clone());
                true
            }
        },
        TermKind::Const(c) => matches!(&t.0.kind, TermKind::Const(d) if c == d),
        TermKind::App(f, xs) => match &t.0.kind {
            TermKind::App(g, ys) => {
                f == g
                    && xs.len() == ys.len()
                    && p.0.size <= t.0.size
                    && xs.iter().zip(ys.iter()).all(|(x, y)| match_into(x, y, binds))
            }
            _ => false,
        },
    }
}

/// `t` is an instance of `s`, written `t ≥ s`.
pub fn subsumes(s: &FTerm, t: &FTerm) -> bool {
    let mut binds = HashMap::new();
    match_into(s, t, &mut binds)
}

/// `s` and `t` are equal up to a bijective renaming of variables.
pub fn variant(s: &FTerm, t: &FTerm) -> bool {
    s.tree_size() == t.tree_size() && s.height() == t.height() && s.canonical() == t.canonical()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(a: FTerm, b: FTerm) -> FTerm {
        FTerm::imp(a, b)
    }
    fn v(k: u32) -> FTerm {
        FTerm::num(k)
    }

    #[test]
    fn positions_and_replacement() {
        let t = i(i(v(1), v(2)), v(3));
        let ps: Vec<String> = t.positions().iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, ["ε", "1", "1.1", "1.2", "2"]);
        assert_eq!(t.subterm_at(&"1.2".parse().unwrap()).unwrap(), v(2));
        assert!(t.subterm_at(&"2.1".parse().unwrap()).is_err());
        let r = t.replace_at(&"1".parse().unwrap(), v(4)).unwrap();
        assert_eq!(r, i(v(4), v(3)));
    }

    #[test]
    fn unify_occurs_check() {
        let mut m = TermPairSet::new();
        m.insert(v(1), i(v(1), v(2)));
        assert!(unify(&m).is_err());
    }

    #[test]
    fn unify_basic() {
        let mut m = TermPairSet::new();
        m.insert(i(v(1), v(2)), i(v(2), i(v(3), v(3))));
        let s = unify(&m).unwrap();
        assert!(s.is_idempotent());
        assert_eq!(s.apply(&v(1)), s.apply(&v(2)));
        assert_eq!(s.apply(&v(1)), i(v(3), v(3)));
    }

    #[test]
    fn subsumption_and_variants() {
        let s = i(v(1), v(2));
        let t = i(v(2), v(1));
        assert!(subsumes(&s, &t) && subsumes(&t, &s));
        assert!(variant(&s, &t));
        let u = i(v(1), v(1));
        assert!(subsumes(&s, &u));
        assert!(!subsumes(&u, &s));
        assert!(!variant(&s, &u));
    }

    #[test]
    fn canonical_names() {
        assert_eq!(Var::canonical_name(1), "p");
        assert_eq!(Var::canonical_name(8), "w");
        assert_eq!(Var::canonical_name(9), "v1");
        for k in 1..40 {
            assert_eq!(Var::from_name(&Var::canonical_name(k)), Var::Num(k));
        }
    }

    #[test]
    fn measures() {
        let t = i(i(v(1), v(2)), i(i(v(2), v(3)), i(v(1), v(3))));
        assert_eq!(t.tree_size(), 5);
        assert_eq!(t.height(), 3);
        assert_eq!(t.compacted_size(), 5);
        assert_eq!(t.vars().len(), 3);
        let shared = i(i(v(1), v(1)), i(v(1), v(1)));
        assert_eq!(shared.compacted_size(), 2);
    }
}
