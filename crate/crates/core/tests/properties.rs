//! Invariants as property tests.

mod common;

use std::collections::HashSet;

use cdtk::compacted::compact;
use cdtk::levels::psp_level;
use cdtk::reduce::{self, ReductionKind};
use cdtk::semantics::{pairings, shift, IptTable};
use cdtk::term::{match_term, unify_pairs, Sym};
use cdtk::{
    c_geq, c_gt, mgt, n_simplify, normalize, subsumes, variant, AxiomAssignment, DTerm, FTerm, NormalizeOptions,
    Position, PrimLabel, Substitution, Var,
};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_fterm() -> impl Strategy<Value = FTerm> {
    let leaf = (1u32..=4).prop_map(|k| FTerm::var(Var::Num(k)));
    leaf.prop_recursive(4, 24, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| FTerm::imp(a, b)))
}

fn arb_position() -> impl Strategy<Value = Position> {
    prop::collection::vec(1u32..=2, 0..4).prop_map(|v| Position::from_slice(&v))
}

fn arb_positional() -> impl Strategy<Value = FTerm> {
    let leaf = (arb_position(), 0u32..3).prop_map(|(p, i)| {
        FTerm::var(if i == 0 { Var::Y(p) } else { Var::X(p, i) })
    });
    leaf.prop_recursive(3, 16, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| FTerm::imp(a, b)))
}

fn arb_dterm(prims: &'static [&'static str]) -> impl Strategy<Value = DTerm> {
    let leaf = prop::sample::select(prims).prop_map(DTerm::prim);
    leaf.prop_recursive(5, 12, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| DTerm::d(&a, &b)))
}

fn arb_subst() -> impl Strategy<Value = Substitution> {
    prop::collection::vec((1u32..=6, arb_fterm()), 0..4).prop_map(|binds| {
        let mut s = Substitution::new();
        for (k, t) in binds {
            s.bind(Var::Num(k), t);
        }
        s
    })
}

/// A proof with defined MGT under one of the test assignments.
fn proof_case(seed: u64, max_t: u64) -> (AxiomAssignment, DTerm) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = test_assignments().swap_remove((seed % 3) as usize);
    let d = random_proof(&mut rng, max_t, &alpha);
    (alpha, d)
}

fn tuple(ts: &[FTerm]) -> FTerm {
    FTerm::app(Sym::new("tuple"), ts.to_vec())
}

fn vars_of(ts: &[&FTerm]) -> Vec<Var> {
    let mut seen = Vec::new();
    for t in ts {
        for v in t.vars() {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unifier_is_most_general(a in arb_fterm(), b in arb_fterm(), extra in arb_subst()) {
        if let Ok(sigma) = unify_pairs([(&a, &b)]) {
            prop_assert_eq!(sigma.apply(&a), sigma.apply(&b));
            // Any other unifier is an instance of sigma on Var(m).
            let other = sigma.compose(&extra);
            prop_assert_eq!(other.apply(&a), other.apply(&b));
            let vs: Vec<FTerm> = vars_of(&[&a, &b]).into_iter().map(FTerm::var).collect();
            let general = tuple(&vs.iter().map(|v| sigma.apply(v)).collect::<Vec<_>>());
            let special = tuple(&vs.iter().map(|v| other.apply(v)).collect::<Vec<_>>());
            prop_assert!(match_term(&general, &special).is_some());
        }
    }

    #[test]
    fn unifier_is_clean(a in arb_fterm(), b in arb_fterm()) {
        if let Ok(sigma) = unify_pairs([(&a, &b)]) {
            prop_assert!(sigma.is_idempotent());
            let vars: HashSet<Var> = vars_of(&[&a, &b]).into_iter().collect();
            for (v, t) in sigma.iter() {
                prop_assert!(vars.contains(v));
                prop_assert!(t.vars().iter().all(|w| vars.contains(w)));
            }
        }
    }

    #[test]
    fn unification_in_stages(a in arb_fterm(), b in arb_fterm(), c in arb_fterm(), e in arb_fterm()) {
        // M ∪ N is unifiable iff N·unify(M) is.
        let whole = unify_pairs([(&a, &b), (&c, &e)]).is_ok();
        let staged = match unify_pairs([(&a, &b)]) {
            Ok(s) => unify_pairs([(&s.apply(&c), &s.apply(&e))]).is_ok(),
            Err(_) => false,
        };
        prop_assert_eq!(whole, staged);
    }

    #[test]
    fn subsumption_is_a_preorder(s in arb_fterm(), t1 in arb_subst(), t2 in arb_subst()) {
        let t = t1.apply(&s);
        let u = t2.apply(&t);
        prop_assert!(subsumes(&s, &s));
        prop_assert!(subsumes(&s, &t));
        prop_assert!(subsumes(&t, &u));
        prop_assert!(subsumes(&s, &u));
        prop_assert_eq!(variant(&s, &t), subsumes(&t, &s));
    }

    #[test]
    fn shift_gives_variant(s in arb_positional(), p in arb_position()) {
        let t = shift(&s, &p).unwrap();
        prop_assert!(variant(&s, &t));
    }

    #[test]
    fn subterms_are_c_smaller(d in arb_dterm(&["1", "2"])) {
        for e in d.subterms() {
            prop_assert!(c_geq(&d, &e));
            let trivial = d.children().is_some_and(|(a, b)| a.is_prim() && b.is_prim());
            if e != d && !trivial {
                prop_assert!(c_gt(&d, &e));
            }
        }
    }

    #[test]
    fn compaction_order_bounds_c_size(d in arb_dterm(&["1", "2"]), e in arb_dterm(&["1", "2"])) {
        if d.is_compound() && c_geq(&d, &e) {
            prop_assert!(d.c_size() >= e.c_size());
        }
        if c_gt(&d, &e) {
            prop_assert!(d.c_size() > e.c_size());
        }
    }

    #[test]
    fn compact_is_minimal(a in arb_dterm(&["1", "2"]), b in arb_dterm(&["1", "2"])) {
        let roots = vec![(PrimLabel::new("ra"), a.clone()), (PrimLabel::new("rb"), b.clone())];
        let delta = compact(&roots);
        let expanded = delta.expand_all().unwrap();
        // Aliases (equal roots) aside, no two labels expand to the same tree.
        let bound: Vec<&DTerm> = delta.bindings().keys().map(|l| &expanded[l]).collect();
        let distinct: HashSet<&DTerm> = bound.iter().copied().collect();
        prop_assert_eq!(distinct.len(), bound.len());
        let all: HashSet<DTerm> = a.compound_subterms().into_iter().chain(b.compound_subterms()).collect();
        let inner: u64 = delta.bindings().values().map(DTerm::t_size).sum();
        prop_assert_eq!(inner as usize, all.len());
        prop_assert_eq!(delta.expand(&PrimLabel::new("ra")).unwrap(), a);
    }

    #[test]
    fn dnotation_round_trip(d in arb_dterm(&["1", "2", "7", "12", "n", "305"])) {
        let s = cdtk::formats::dnotation::print(&d);
        prop_assert_eq!(cdtk::formats::dnotation::parse(&s).unwrap(), d.clone());
        let f = cdtk::formats::dnotation::print_functional(&d);
        prop_assert_eq!(cdtk::formats::dnotation::parse(&f).unwrap(), d);
    }

    #[test]
    fn polish_round_trip(t in arb_fterm()) {
        let s = cdtk::formats::polish::print_polish(&t);
        prop_assert_eq!(f(&s), t.clone());
        prop_assert_eq!(f(&t.to_string()), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn pairings_localize(seed in any::<u64>()) {
        // y_ε·unify(pairings(d|p))·shift_p ≐ y_p·unify(pairings of d below p)
        let (alpha, d) = proof_case(seed, 7);
        for (p, sub) in d.positioned_subterms() {
            let local = pairings(&sub, &alpha).unwrap();
            let s1 = unify_pairs(local.iter().map(|x| (&x.left, &x.right))).unwrap();
            let lhs = shift(&s1.apply(&FTerm::var(Var::Y(Position::root()))), &p).unwrap();
            let global = pairings(&d, &alpha).unwrap();
            let below = global.iter().filter(|x| p.is_prefix_of(&x.position));
            let s2 = unify_pairs(below.map(|x| (&x.left, &x.right))).unwrap();
            let rhs = s2.apply(&FTerm::var(Var::Y(p.clone())));
            prop_assert!(variant(&lhs, &rhs), "{} at {}", d, p);
        }
    }

    #[test]
    fn ipt_instance_of_mgt_and_junction(seed in any::<u64>()) {
        let (alpha, d) = proof_case(seed, 8);
        let t = IptTable::new(&d, &alpha).unwrap().unwrap();
        for (p, sub) in d.positioned_subterms() {
            let m = mgt(&sub, &alpha).unwrap().unwrap();
            prop_assert!(subsumes(&m, t.get(&p).unwrap()));
            if sub.is_compound() && !sub.minor().unwrap().is_n() {
                let major = t.get(&p.child(1)).unwrap();
                let minor = t.get(&p.child(2)).unwrap();
                prop_assert_eq!(&FTerm::imp(minor.clone(), t.get(&p).unwrap().clone()), major);
            }
        }
    }

    #[test]
    fn mgt_ignores_label_and_axiom_renaming(seed in any::<u64>()) {
        let (alpha, d) = proof_case(seed, 8);
        let m = mgt(&d, &alpha).unwrap().unwrap();
        let renamed = d.substitute_prims(&|l| Some(DTerm::prim(format!("a{l}").as_str())));
        let mut beta = AxiomAssignment::new();
        for l in alpha.labels() {
            let ax = alpha.formula(l).unwrap().shift_nums(7);
            beta.insert(PrimLabel::new(&format!("a{l}")), &ax);
        }
        let m2 = mgt(&renamed, &beta).unwrap().unwrap();
        prop_assert!(variant(&m, &m2));
    }

    #[test]
    fn s_family_inclusions(seed in any::<u64>()) {
        let (alpha, d) = proof_case(seed, 8);
        let s: HashSet<_> = reduce::find_s_family(&d, &alpha, ReductionKind::S).unwrap().into_iter().collect();
        for k in [ReductionKind::IS, ReductionKind::MS] {
            for pair in reduce::find_s_family(&d, &alpha, k).unwrap() {
                prop_assert!(s.contains(&pair), "{} {:?} not in S", k, pair);
            }
        }
    }

    #[test]
    fn n_simplify_preserves_subproof_theorems(seed in any::<u64>()) {
        let (alpha, d) = proof_case(seed, 8);
        let s = n_simplify(&d, &alpha).unwrap();
        prop_assert_eq!(n_simplify(&s, &alpha).unwrap(), s.clone());
        for (p, sub) in s.positioned_subterms() {
            if !sub.is_n() {
                let a = mgt(&sub, &alpha).unwrap().unwrap();
                let b = mgt(&d.subterm_at(&p).unwrap(), &alpha).unwrap().unwrap();
                prop_assert!(variant(&a, &b));
            }
        }
    }

    #[test]
    fn normalize_traces_decrease(seed in any::<u64>()) {
        let (alpha, d) = proof_case(seed, 8);
        let (nf, trace) = normalize(&d, &alpha, &NormalizeOptions::kinds(&ReductionKind::ALL)).unwrap();
        for s in &trace {
            let before = (s.before.c_size, s.before.sc_size, s.before.t_size);
            let after = (s.after.c_size, s.after.sc_size, s.after.t_size);
            if s.kind.is_s_family() {
                prop_assert!(after.2 < before.2);
            } else if s.kind.is_c_family() {
                prop_assert!(after < before);
            }
        }
        let (m, m2) = (mgt(&d, &alpha).unwrap().unwrap(), mgt(&nf, &alpha).unwrap().unwrap());
        prop_assert!(subsumes(&m2, &m));
        for k in [ReductionKind::S, ReductionKind::C] {
            prop_assert!(reduce::is_regular(&nf, &alpha, k).unwrap());
        }
    }
}

#[test]
fn psp_levels_have_matching_c_size() {
    let one = PrimLabel::new("1");
    for n in 0..=5 {
        let level = psp_level(n, &[one.clone()]);
        assert!(level.iter().all(|d| d.c_size() == n));
        let distinct: HashSet<&DTerm> = level.iter().collect();
        assert_eq!(distinct.len(), level.len());
    }
    // Incompleteness shows first at level 4.
    assert_eq!(psp_level(4, &[one]).len(), 105);
    assert_eq!(cdtk::count_dterms(cdtk::Measure::CSize, 4).unwrap(), 111);
}

#[test]
fn ipt_instance_of_mgt_on_corpora() {
    for c in [cdtk::data::meredith(), cdtk::data::lukasiewicz(), cdtk::data::d29()] {
        let mut cache = cdtk::semantics::MgtCache::new(&c.axioms);
        for (_, root) in c.proof.expanded_roots().unwrap() {
            let t = IptTable::new(&root, &c.axioms).unwrap().unwrap();
            for (p, sub) in root.positioned_subterms() {
                let m = cache.mgt(&sub).unwrap().unwrap();
                assert!(subsumes(&m, t.get(&p).unwrap()), "{sub} at {p}");
            }
        }
    }
}
