//! Enumeration of D-terms by size measure and level, and counting.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dterm::{DTerm, PrimLabel};
use crate::error::{Error, Result};

/// Measure used to stratify D-terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    TSize,
    Height,
    CSize,
    Prime,
    Psp,
}

impl FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tsize" | "t_size" | "tree" => Ok(Measure::TSize),
            "height" => Ok(Measure::Height),
            "csize" | "c_size" | "compacted" => Ok(Measure::CSize),
            "prime" => Ok(Measure::Prime),
            "psp" => Ok(Measure::Psp),
            other => Err(format!("unknown measure `{other}`")),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::TSize => "tsize",
            Measure::Height => "height",
            Measure::CSize => "csize",
            Measure::Prime => "prime",
            Measure::Psp => "psp",
        })
    }
}

/// Largest compacted size that [`dterms_by_csize`] will enumerate.
pub const MAX_CSIZE_ENUMERATION: usize = 7;
/// Largest PSP level whose count is computed.
pub const MAX_PSP_COUNT: usize = 10;

/// Number of D-terms over the single primitive `1` with measure exactly `n`.
pub fn count_dterms(measure: Measure, n: usize) -> Result<u128> {
    let overflow = || Error::ResourceLimit(format!("{measure} count for {n} overflows"));
    match measure {
        Measure::TSize => {
            // Catalan numbers.
            let mut c: Vec<u128> = vec![1];
            for m in 1..=n {
                let mut s: u128 = 0;
                for i in 0..m {
                    s = c[i]
                        .checked_mul(c[m - 1 - i])
                        .and_then(|x| s.checked_add(x))
                        .ok_or_else(overflow)?;
                }
                c.push(s);
            }
            Ok(c[n])
        }
        Measure::Height => {
            // exact(h+1) = exact(h) * (exact(h) + 2 * below(h))
            let mut exact: u128 = 1;
            let mut below: u128 = 0;
            for _ in 0..n {
                let next = below
                    .checked_mul(2)
                    .and_then(|b| b.checked_add(exact))
                    .and_then(|s| s.checked_mul(exact))
                    .ok_or_else(overflow)?;
                below = below.checked_add(exact).ok_or_else(overflow)?;
                exact = next;
            }
            Ok(exact)
        }
        Measure::CSize => {
            if n > MAX_CSIZE_ENUMERATION {
                return Err(Error::ResourceLimit(format!(
                    "csize enumeration is limited to {MAX_CSIZE_ENUMERATION}"
                )));
            }
            let levels = dterms_by_csize(n, &[PrimLabel::new("1")])?;
            Ok(levels[n].len() as u128)
        }
        Measure::Prime => Ok(prime_level(n, &PrimLabel::new("1")).len() as u128),
        Measure::Psp => {
            if n > MAX_PSP_COUNT {
                return Err(Error::ResourceLimit(format!("psp count is limited to level {MAX_PSP_COUNT}")));
            }
            if n <= 1 {
                return Ok(1);
            }
            // Children of distinct parents are distinct (they differ in height
            // or in the parent argument), so the last level need not be built.
            let one = [PrimLabel::new("1")];
            let prev = psp_levels(n - 1, &one).pop().expect("levels");
            Ok(prev.iter().map(|d| psp_child_count(d, &one) as u128).sum())
        }
    }
}

/// Counts for levels `0..=upto`.
pub fn count_upto(measure: Measure, upto: usize) -> Result<Vec<u128>> {
    match measure {
        Measure::Psp => {
            let one = [PrimLabel::new("1")];
            let levels = psp_levels(upto.saturating_sub(1), &one);
            let mut out: Vec<u128> = levels.iter().map(|l| l.len() as u128).collect();
            if upto >= 1 {
                let last = levels.last().expect("levels");
                out.push(last.iter().map(|d| psp_child_count(d, &one) as u128).sum());
            }
            out.truncate(upto + 1);
            Ok(out)
        }
        Measure::CSize => {
            if upto > MAX_CSIZE_ENUMERATION {
                return Err(Error::ResourceLimit(format!(
                    "csize enumeration is limited to {MAX_CSIZE_ENUMERATION}"
                )));
            }
            Ok(dterms_by_csize(upto, &[PrimLabel::new("1")])?
                .iter()
                .map(|l| l.len() as u128)
                .collect())
        }
        _ => (0..=upto).map(|n| count_dterms(measure, n)).collect(),
    }
}

/// PrimeLevel(n) for a single axiom label.
pub fn prime_level(n: usize, axiom: &PrimLabel) -> Vec<DTerm> {
    let a = DTerm::prim(axiom.clone());
    match n {
        0 => vec![a],
        1 => vec![DTerm::d(&a, &a)],
        _ => {
            let mut level = vec![DTerm::d(&a, &a)];
            for _ in 2..=n {
                let mut next = Vec::with_capacity(level.len() * 2);
                for d in &level {
                    next.push(DTerm::d(&a, d));
                    next.push(DTerm::d(d, &a));
                }
                level = next;
            }
            level
        }
    }
}

/// Children of `d` in the next PSP level.
pub fn psp_children(d: &DTerm, axioms: &[PrimLabel]) -> Vec<DTerm> {
    let subs = d.subterms();
    let mut out = Vec::with_capacity(2 * subs.len() + 2 * axioms.len());
    let mut seen = HashSet::new();
    for e in subs.iter().rev() {
        let c = DTerm::d(d, e);
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    for e in subs.iter().rev().skip(1) {
        let c = DTerm::d(e, d);
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    if axioms.len() > 1 || axioms.iter().any(|a| !d.prims().contains(a)) {
        for a in axioms {
            let a = DTerm::prim(a.clone());
            for c in [DTerm::d(d, &a), DTerm::d(&a, d)] {
                if seen.insert(c.clone()) {
                    out.push(c);
                }
            }
        }
    }
    out
}

fn psp_child_count(d: &DTerm, axioms: &[PrimLabel]) -> usize {
    let prims = d.prims();
    if axioms.iter().all(|a| prims.contains(a)) {
        2 * d.subterms().len() - 1
    } else {
        psp_children(d, axioms).len()
    }
}

/// PSPLevel(0..=n). Level 0 holds the axioms; duplicates across parents are
/// dropped, keeping the first.
pub fn psp_levels(n: usize, axioms: &[PrimLabel]) -> Vec<Vec<DTerm>> {
    let mut levels = vec![axioms.iter().map(|a| DTerm::prim(a.clone())).collect::<Vec<_>>()];
    for _ in 0..n {
        let prev = levels.last().expect("levels");
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for d in prev {
            for c in psp_children(d, axioms) {
                if seen.insert(c.clone()) {
                    next.push(c);
                }
            }
        }
        levels.push(next);
    }
    levels
}

pub fn psp_level(n: usize, axioms: &[PrimLabel]) -> Vec<DTerm> {
    psp_levels(n, axioms).pop().expect("levels")
}

/// All D-terms over `prims` stratified by compacted size `0..=max`.
/// Level 0 holds the primitives.
pub fn dterms_by_csize(max: usize, prims: &[PrimLabel]) -> Result<Vec<Vec<DTerm>>> {
    if max > MAX_CSIZE_ENUMERATION {
        return Err(Error::ResourceLimit(format!(
            "csize enumeration is limited to {MAX_CSIZE_ENUMERATION}"
        )));
    }
    // Each pool member carries its compound subterms as a sorted index list.
    let mut pool: Vec<(DTerm, Vec<u32>)> = prims.iter().map(|p| (DTerm::prim(p.clone()), Vec::new())).collect();
    let mut levels: Vec<Vec<DTerm>> = vec![pool.iter().map(|(d, _)| d.clone()).collect()];
    let mut next_index = 0u32;
    for n in 1..=max {
        let mut level = Vec::new();
        for (a, sa) in &pool {
            for (b, sb) in &pool {
                if sa.len().max(sb.len()) + 1 > n || sa.len() + sb.len() + 1 < n {
                    continue;
                }
                if union_len(sa, sb) + 1 == n {
                    level.push((DTerm::d(a, b), merge(sa, sb)));
                }
            }
        }
        let mut terms = Vec::with_capacity(level.len());
        for (d, mut set) in level {
            set.push(next_index);
            next_index += 1;
            terms.push(d.clone());
            pool.push((d, set));
        }
        levels.push(terms);
    }
    Ok(levels)
}

fn union_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    a.len() + b.len() - common
}

fn merge(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len() + 1);
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// All D-terms over `prims` stratified by tree size `0..=max`.
pub fn dterms_by_tsize(max: usize, prims: &[PrimLabel]) -> Vec<Vec<DTerm>> {
    let mut levels: Vec<Vec<DTerm>> = vec![prims.iter().map(|p| DTerm::prim(p.clone())).collect()];
    for n in 1..=max {
        let mut level = Vec::new();
        for i in 0..n {
            for a in &levels[i] {
                for b in &levels[n - 1 - i] {
                    level.push(DTerm::d(a, b));
                }
            }
        }
        levels.push(level);
    }
    levels
}

/// All D-terms over `prims` stratified by height `0..=max`.
pub fn dterms_by_height(max: usize, prims: &[PrimLabel]) -> Vec<Vec<DTerm>> {
    let mut levels: Vec<Vec<DTerm>> = vec![prims.iter().map(|p| DTerm::prim(p.clone())).collect()];
    for n in 1..=max {
        let below: Vec<DTerm> = levels[..n - 1].iter().flatten().cloned().collect();
        let top = &levels[n - 1];
        let mut level = Vec::new();
        for a in top {
            for b in top.iter().chain(&below) {
                level.push(DTerm::d(a, b));
            }
        }
        for a in &below {
            for b in top {
                level.push(DTerm::d(a, b));
            }
        }
        levels.push(level);
    }
    levels
}
