//! Bundled proofs and problems.

use crate::formats::corpus::{parse_corpus, Corpus};
use crate::formats::tptp::parse_tptp_cd;
use crate::semantics::Problem;

pub const MEREDITH_SRC: &str = include_str!("../data/figure3.cdp");
pub const LUKASIEWICZ_SRC: &str = include_str!("../data/figure9.cdp");
pub const D29_SRC: &str = include_str!("../data/figure12.cdp");
pub const SYLL_SIMP_SRC: &str = include_str!("../data/figure2.cdp");
pub const SYLL_SIMP_PROBLEM_SRC: &str = include_str!("../data/figure2.p");
pub const LCL038_1_SRC: &str = include_str!("../data/lcl038-1.p");

fn corpus(src: &str) -> Corpus {
    parse_corpus(src).expect("bundled corpus parses")
}

/// Meredith's proof of Syll (17), Peirce (18) and Simp (19) from the
/// Łukasiewicz axiom.
pub fn meredith() -> Corpus {
    corpus(MEREDITH_SRC)
}

/// Łukasiewicz's proof in condensed detachment form, 29 steps.
pub fn lukasiewicz() -> Corpus {
    corpus(LUKASIEWICZ_SRC)
}

/// A proof of the same three goals with compacted size 29.
pub fn d29() -> Corpus {
    corpus(D29_SRC)
}

/// A seven-step proof from the Syll-Simp axiom.
pub fn syll_simp() -> Corpus {
    corpus(SYLL_SIMP_SRC)
}

pub fn syll_simp_problem() -> Problem {
    parse_tptp_cd(SYLL_SIMP_PROBLEM_SRC, "syll-simp").expect("bundled problem parses")
}

/// Syll from the Łukasiewicz axiom.
pub fn lcl038_1() -> Problem {
    parse_tptp_cd(LCL038_1_SRC, "LCL038-1").expect("bundled problem parses")
}
