//! Prefix-coded implicational formulas for the inner loop of proof search.
//!
//! A formula is a sequence of codes in prefix order: `IMP` for implication,
//! `1..` for variables numbered by first occurrence, and values from `CONST`
//! up for constants (only in goals).

use std::collections::HashMap;
use std::sync::Arc;

use crate::term::{FTerm, Sym, TermKind, Var};

pub(crate) const IMP: u32 = 0;
pub(crate) const CONST: u32 = 1 << 31;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Flat(pub Arc<[u32]>);

impl Flat {
    /// Encode an implicational formula; `None` for other symbols.
    /// Constants are numbered in `consts`.
    pub fn encode(t: &FTerm, consts: &mut Vec<Sym>) -> Option<Flat> {
        let mut vars: HashMap<Var, u32> = HashMap::new();
        let mut out = Vec::with_capacity(2 * t.tree_size() as usize + 1);
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match t.kind() {
                TermKind::Var(v) => {
                    let n = vars.len() as u32 + 1;
                    out.push(*vars.entry(v.clone()).or_insert(n));
                }
                TermKind::Const(c) => {
                    let k = match consts.iter().position(|x| x == c) {
                        Some(k) => k,
                        None => {
                            consts.push(c.clone());
                            consts.len() - 1
                        }
                    };
                    out.push(CONST + k as u32);
                }
                TermKind::App(..) => {
                    let (a, b) = t.as_imp()?;
                    out.push(IMP);
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        Some(Flat(out.into()))
    }

    pub fn decode(&self, consts: &[Sym]) -> FTerm {
        fn go(code: &[u32], pos: &mut usize, consts: &[Sym]) -> FTerm {
            let c = code[*pos];
            *pos += 1;
            if c == IMP {
                let a = go(code, pos, consts);
                let b = go(code, pos, consts);
                FTerm::imp(a, b)
            } else if c >= CONST {
                FTerm::app(consts[(c - CONST) as usize].clone(), Vec::new())
            } else {
                FTerm::num(c)
            }
        }
        go(&self.0, &mut 0, consts)
    }

    /// Number of implications.
    pub fn tree_size(&self) -> u64 {
        self.0.iter().filter(|&&c| c == IMP).count() as u64
    }

    pub fn height(&self) -> u32 {
        let mut h = 0u32;
        // Open implications on the current path, each with its pending arity.
        let mut pending: Vec<u8> = Vec::new();
        for &c in self.0.iter() {
            if c == IMP {
                pending.push(2);
                h = h.max(pending.len() as u32);
            } else {
                while let Some(top) = pending.last_mut() {
                    *top -= 1;
                    if *top == 0 {
                        pending.pop();
                    } else {
                        break;
                    }
                }
            }
        }
        h
    }

    pub fn var_count(&self) -> usize {
        self.0.iter().filter(|&&c| c != IMP && c < CONST).max().copied().unwrap_or(0) as usize
    }

    pub fn max_var(&self) -> u32 {
        self.var_count() as u32
    }

    /// Whether the formula is a variable or `i(x, t)` with `x` not in `t`.
    pub fn admits_n(&self) -> bool {
        match self.0.first() {
            Some(&IMP) => {
                let x = self.0[1];
                x != IMP && x < CONST && !self.0[2..].contains(&x)
            }
            Some(&c) => c < CONST,
            None => false,
        }
    }
}

/// Offset just past the subterm starting at `i`.
fn skip(code: &[u32], mut i: usize) -> usize {
    let mut need = 1usize;
    while need > 0 {
        if code[i] == IMP {
            need += 2;
        }
        need -= 1;
        i += 1;
    }
    i
}

/// Whether `target` is an instance of `pattern`; variables of `target`
/// count as constants.
pub(crate) fn subsumes_flat(pattern: &Flat, target: &Flat) -> bool {
    let (p, t) = (&pattern.0[..], &target.0[..]);
    let mut binds: Vec<Option<(usize, usize)>> = vec![None; pattern.max_var() as usize + 1];
    let (mut i, mut j) = (0, 0);
    while i < p.len() {
        let c = p[i];
        if j >= t.len() {
            return false;
        }
        if c == IMP {
            if t[j] != IMP {
                return false;
            }
            i += 1;
            j += 1;
        } else if c >= CONST {
            if t[j] != c {
                return false;
            }
            i += 1;
            j += 1;
        } else {
            let end = skip(t, j);
            match binds[c as usize] {
                Some((s, e)) => {
                    if t[s..e] != t[j..end] {
                        return false;
                    }
                }
                None => binds[c as usize] = Some((j, end)),
            }
            i += 1;
            j = end;
        }
    }
    true
}

/// Discrimination tree over prefix codes for retrieving generalizations.
/// Variables are indexed as wildcards; hits are confirmed by matching.
pub(crate) struct Index {
    /// Per node: child for an implication, child for a wildcard.
    imp: Vec<u32>,
    star: Vec<u32>,
    leaves: HashMap<u32, Vec<u32>>,
    terms: Vec<Flat>,
}

impl Default for Index {
    fn default() -> Self {
        Index {
            imp: vec![NONE],
            star: vec![NONE],
            leaves: HashMap::new(),
            terms: Vec::new(),
        }
    }
}

impl Index {
    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn insert(&mut self, f: Flat) {
        let mut n = 0usize;
        for &c in f.0.iter() {
            let next = if c == IMP { self.imp[n] } else { self.star[n] };
            n = if next == NONE {
                let id = self.imp.len() as u32;
                self.imp.push(NONE);
                self.star.push(NONE);
                if c == IMP {
                    self.imp[n] = id;
                } else {
                    self.star[n] = id;
                }
                id as usize
            } else {
                next as usize
            };
        }
        self.leaves.entry(n as u32).or_default().push(self.terms.len() as u32);
        self.terms.push(f);
    }

    /// Whether some indexed formula subsumes `f`.
    pub fn generalizes(&self, f: &Flat) -> bool {
        let code = &f.0[..];
        let mut stack = vec![(0u32, 0usize)];
        while let Some((n, j)) = stack.pop() {
            if j == code.len() {
                if let Some(ids) = self.leaves.get(&n) {
                    if ids.iter().any(|&i| subsumes_flat(&self.terms[i as usize], f)) {
                        return true;
                    }
                }
                continue;
            }
            let s = self.star[n as usize];
            if s != NONE {
                stack.push((s, skip(code, j)));
            }
            if code[j] == IMP {
                let i = self.imp[n as usize];
                if i != NONE {
                    stack.push((i, j + 1));
                }
            }
        }
        false
    }
}

/// Union-find unification over a small arena.
#[derive(Default)]
pub(crate) struct Detacher {
    /// `u32::MAX` marks a variable node, otherwise the left child.
    left: Vec<u32>,
    right: Vec<u32>,
    parent: Vec<u32>,
    /// Class representative -> an implication node of the class.
    schema: Vec<u32>,
    color: Vec<u8>,
    rename: Vec<u32>,
    stack: Vec<(u32, u32)>,
}

const NONE: u32 = u32::MAX;

impl Detacher {
    fn load(&mut self, code: &[u32], var_base: u32, vars: &mut Vec<u32>) -> u32 {
        // Parse prefix code into nodes; variables are shared per index.
        fn go(d: &mut Detacher, code: &[u32], pos: &mut usize, base: u32, vars: &mut Vec<u32>) -> u32 {
            let c = code[*pos];
            *pos += 1;
            if c == IMP {
                let a = go(d, code, pos, base, vars);
                let b = go(d, code, pos, base, vars);
                d.node(a, b)
            } else {
                let k = (base + c) as usize;
                if vars.len() <= k {
                    vars.resize(k + 1, NONE);
                }
                if vars[k] == NONE {
                    vars[k] = d.node(NONE, NONE);
                }
                vars[k]
            }
        }
        go(self, code, &mut 0, var_base, vars)
    }

    fn node(&mut self, l: u32, r: u32) -> u32 {
        let id = self.left.len() as u32;
        self.left.push(l);
        self.right.push(r);
        self.parent.push(id);
        self.schema.push(if l == NONE { NONE } else { id });
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn unify(&mut self, a: u32, b: u32) -> bool {
        self.stack.clear();
        self.stack.push((a, b));
        while let Some((a, b)) = self.stack.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let (sa, sb) = (self.schema[ra as usize], self.schema[rb as usize]);
            self.parent[ra as usize] = rb;
            if sa != NONE && sb != NONE {
                self.stack.push((self.right[sa as usize], self.right[sb as usize]));
                self.stack.push((self.left[sa as usize], self.left[sb as usize]));
            } else if sb == NONE {
                self.schema[rb as usize] = sa;
            }
        }
        true
    }

    /// Depth-first check that the solved graph has no cycle below `x`.
    fn acyclic(&mut self, x: u32) -> bool {
        let r = self.find(x);
        match self.color[r as usize] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        let s = self.schema[r as usize];
        if s == NONE {
            self.color[r as usize] = 2;
            return true;
        }
        self.color[r as usize] = 1;
        let ok = self.acyclic(self.left[s as usize]) && self.acyclic(self.right[s as usize]);
        self.color[r as usize] = 2;
        ok
    }

    fn emit(&mut self, x: u32, out: &mut Vec<u32>, next: &mut u32) {
        let r = self.find(x);
        let s = self.schema[r as usize];
        if s == NONE {
            if self.rename[r as usize] == 0 {
                *next += 1;
                self.rename[r as usize] = *next;
            }
            out.push(self.rename[r as usize]);
        } else {
            out.push(IMP);
            let (l, rr) = (self.left[s as usize], self.right[s as usize]);
            self.emit(l, out, next);
            self.emit(rr, out, next);
        }
    }

    /// The conclusion of detaching `minor` from `major`, canonical. `None`
    /// if not unifiable. Output longer than `max_len` codes also gives `None`
    /// with `overflow` set.
    pub fn detach(&mut self, major: &Flat, minor: &Flat, max_len: usize, overflow: &mut bool) -> Option<Flat> {
        self.left.clear();
        self.right.clear();
        self.parent.clear();
        self.schema.clear();
        let mut vars = Vec::new();
        let ka = major.max_var();
        let a = self.load(&major.0, 0, &mut vars);
        let b = self.load(&minor.0, ka, &mut vars);
        let z = self.node(NONE, NONE);
        let bz = self.node(b, z);
        self.unify(a, bz);
        self.color.clear();
        self.color.resize(self.left.len(), 0);
        for x in 0..self.left.len() as u32 {
            if !self.acyclic(x) {
                return None;
            }
        }
        self.rename.clear();
        self.rename.resize(self.left.len(), 0);
        let mut out = Vec::new();
        let mut next = 0;
        if !self.emit_bounded(z, &mut out, &mut next, max_len) {
            *overflow = true;
            return None;
        }
        Some(Flat(out.into()))
    }

    fn emit_bounded(&mut self, x: u32, out: &mut Vec<u32>, next: &mut u32, max_len: usize) -> bool {
        // The solved graph is a DAG, so the tree can be exponentially larger;
        // stop early when it exceeds the bound.
        if out.len() >= max_len {
            return false;
        }
        let r = self.find(x);
        let s = self.schema[r as usize];
        if s == NONE {
            self.emit(x, out, next);
            true
        } else {
            out.push(IMP);
            let (l, rr) = (self.left[s as usize], self.right[s as usize]);
            self.emit_bounded(l, out, next, max_len) && self.emit_bounded(rr, out, next, max_len)
        }
    }
}
