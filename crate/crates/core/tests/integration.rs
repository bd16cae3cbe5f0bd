mod common;

use common::*;

use cdtk::data;
use cdtk::formats::corpus::{parse_corpus, print_corpus};
use cdtk::formats::json::{proof_from_json, proof_to_json};
use cdtk::formats::tptp::{parse_tptp_cd, print_tptp_cd};
use cdtk::prover::Dedup;
use cdtk::semantics::lemma_mgts;
use cdtk::{check_proof, enumerate_lemmas, prove, variant, EnumPolicy, PolicyKind, ProveOutcome};

fn proved(outcome: ProveOutcome) -> Box<cdtk::prover::ProofResult> {
    match outcome {
        ProveOutcome::Proved(r) => r,
        ProveOutcome::Exhausted(_) => panic!("no proof found"),
    }
}

#[test]
fn corpus_files_round_trip() {
    for c in [data::meredith(), data::lukasiewicz(), data::d29(), data::syll_simp()] {
        let text = print_corpus(&c);
        let again = parse_corpus(&text).unwrap();
        assert_eq!(print_corpus(&again), text);
        assert_eq!(again.goals, c.goals);
        assert_eq!(again.proof.expanded_roots().unwrap(), c.proof.expanded_roots().unwrap());
    }
}

#[test]
fn displayed_formulas_match_recomputed_mgts() {
    for c in [data::meredith(), data::lukasiewicz(), data::d29()] {
        let mgts = lemma_mgts(&c.proof, &c.axioms).unwrap();
        for (l, shown) in &c.formulas {
            let m = mgts[l].as_ref().unwrap_or_else(|| panic!("{l}: undefined"));
            assert!(variant(m, shown), "{l}: {m} vs {shown}");
        }
    }
}

#[test]
fn json_round_trip_keeps_roots_and_theorems() {
    let c = data::meredith();
    let v = proof_to_json(&c.axioms, &c.proof, &c.goals);
    let back = proof_from_json(&v.to_string()).unwrap();
    assert_eq!(back.roots, c.goals);
    assert_eq!(back.proof.expanded_roots().unwrap(), c.proof.expanded_roots().unwrap());
    let a = lemma_mgts(&c.proof, &c.axioms).unwrap();
    let b = lemma_mgts(&back.proof, &back.axioms).unwrap();
    for (l, m) in &a {
        match (m, &b[l]) {
            (Some(x), Some(y)) => assert!(variant(x, y)),
            (x, y) => assert_eq!(x.is_none(), y.is_none()),
        }
    }
}

#[test]
fn tptp_round_trip() {
    for p in [data::lcl038_1(), data::syll_simp_problem()] {
        let text = print_tptp_cd(&p);
        let q = parse_tptp_cd(&text, &p.name).unwrap();
        assert_eq!(q.goal, p.goal);
        let (a, b): (Vec<_>, Vec<_>) = (p.axioms.labels().collect(), q.axioms.labels().collect());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!(variant(p.axioms.get(x).unwrap(), q.axioms.get(y).unwrap()));
        }
    }
}

#[test]
fn emitted_lemmas_carry_their_mgt() {
    for alpha in test_assignments() {
        let mut policy = EnumPolicy::new(PolicyKind::Psp, 4);
        policy.dedup = Dedup::Variant;
        let lemmas: Vec<_> = enumerate_lemmas(&alpha, &policy).unwrap().map(Result::unwrap).collect();
        assert!(lemmas.len() > alpha.len());
        for e in &lemmas {
            let m = cdtk::mgt(&e.dterm, &alpha).unwrap().expect("retained lemma has an MGT");
            assert!(variant(&m, &e.mgt), "{}", e.dterm);
        }
        for (i, a) in lemmas.iter().enumerate() {
            for b in &lemmas[i + 1..] {
                assert!(!variant(&a.mgt, &b.mgt), "{} and {}", a.dterm, b.dterm);
            }
        }
    }
}

#[test]
fn found_proofs_check() {
    let p = data::syll_simp_problem();
    for (kind, dedup) in [
        (PolicyKind::Psp, Dedup::Variant),
        (PolicyKind::Psp, Dedup::Subsumption),
        (PolicyKind::TSize, Dedup::Subsumption),
    ] {
        let mut policy = EnumPolicy::new(kind, 12);
        policy.dedup = dedup;
        let r = proved(prove(&p, &policy).unwrap());
        let verdicts = check_proof(&r.delta, &p).unwrap();
        assert!(verdicts.iter().any(|v| v.proves_goal == Some(true)), "{kind:?}/{dedup:?}");
        assert_eq!(r.delta.expand(&r.delta.roots()[0]).unwrap(), r.dterm);
    }
}

#[test]
fn search_is_deterministic_across_thread_counts() {
    let p = data::syll_simp_problem();
    let policy = EnumPolicy::new(PolicyKind::Psp, 12);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| proved(prove(&p, &policy).unwrap()))
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.dterm, b.dterm);
    assert_eq!(a.stats, b.stats);
    assert_eq!(a.delta.bindings(), b.delta.bindings());
}

#[test]
fn axiom_instance_goal_is_proved_at_level_zero() {
    let src = "cnf(det, axiom, ~p(i(X,Y)) | ~p(X) | p(Y)).\n\
               cnf(ax, axiom, p(i(X,i(Y,X)))).\n\
               cnf(goal, negated_conjecture, ~p(i(a,i(b,a)))).\n";
    let p = parse_tptp_cd(src, "k").unwrap();
    let r = proved(prove(&p, &EnumPolicy::new(PolicyKind::Psp, 3)).unwrap());
    assert_eq!(r.level, 0);
    assert_eq!(r.dterm.t_size(), 0);
}

#[test]
fn bad_corpus_inputs_are_rejected() {
    assert!(parse_corpus("1 : CpCqp\n2 = D13 : CpCqp\n").is_err());
    assert!(parse_corpus("1 : CpCqp\n1 : CpCqp\n").is_err());
}
