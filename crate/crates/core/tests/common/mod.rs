#![allow(dead_code)]

use std::collections::HashSet;

use cdtk::formats::polish::parse_formula;
use cdtk::{mgt, AxiomAssignment, DTerm, FTerm, PrimLabel};
use rand::Rng;

pub const LUKASIEWICZ: &str = "CCCpqrCCrpCsp";
pub const SYLL_SIMP: &str = "CCCpqrCqr";
pub const SIMP: &str = "CpCqp";
pub const SYLL: &str = "CCpqCCqrCpr";
pub const PEIRCE: &str = "CCCpqpp";

pub fn f(s: &str) -> FTerm {
    parse_formula(s, &HashSet::new()).unwrap()
}

pub fn d(s: &str) -> DTerm {
    cdtk::formats::dnotation::parse(s).unwrap()
}

pub fn single(axiom: &str) -> AxiomAssignment {
    AxiomAssignment::single(&f(axiom))
}

pub fn axioms(list: &[&str]) -> AxiomAssignment {
    let mut a = AxiomAssignment::new();
    for (i, s) in list.iter().enumerate() {
        a.insert(PrimLabel::from(i as u32 + 1), &f(s));
    }
    a
}

/// Axiom sets used for random instances: the Łukasiewicz axiom, Syll-Simp,
/// and the K/S pair.
pub fn test_assignments() -> Vec<AxiomAssignment> {
    vec![
        single(LUKASIEWICZ),
        single(SYLL_SIMP),
        axioms(&[SIMP, "CCpCqrCCpqCpr"]),
    ]
}

/// A uniformly shaped random D-term with exactly `t` inner nodes.
pub fn random_tree(rng: &mut impl Rng, t: u64, prims: &[PrimLabel]) -> DTerm {
    if t == 0 {
        return DTerm::prim(prims[rng.gen_range(0..prims.len())].clone());
    }
    let left = rng.gen_range(0..t);
    let a = random_tree(rng, left, prims);
    let b = random_tree(rng, t - 1 - left, prims);
    DTerm::d(&a, &b)
}

/// A random D-term of tree size at most `max_t` whose MGT is defined.
pub fn random_proof(rng: &mut impl Rng, max_t: u64, alpha: &AxiomAssignment) -> DTerm {
    let prims: Vec<PrimLabel> = alpha.labels().cloned().collect();
    loop {
        let t = rng.gen_range(0..=max_t);
        let d = random_tree(rng, t, &prims);
        if matches!(mgt(&d, alpha), Ok(Some(_))) {
            return d;
        }
    }
}

pub fn labels(xs: &[&str]) -> Vec<PrimLabel> {
    xs.iter().map(|s| PrimLabel::new(s)).collect()
}
