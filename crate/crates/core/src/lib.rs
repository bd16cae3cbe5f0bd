//! Condensed detachment proofs.
//!
//! D-terms describe proof structure, first-order terms describe formulas, and
//! unification connects the two: every D-term has a most general theorem
//! (when its pairings are unifiable). On top of that the crate offers
//! structure-reducing proof transformations, per-subproof analysis and a
//! level-wise proof search.

pub mod compacted;
pub mod data;
pub mod dterm;
pub mod error;
mod flat;
pub mod formats;
pub mod analysis;
pub mod levels;
pub mod prover;
pub mod reduce;
pub mod semantics;
pub mod term;

pub use compacted::{compact, CompactedDTerm, DagStats};
pub use dterm::{c_geq, c_gt, c_smaller_set, DTerm, PrimLabel, SizeReport};
pub use error::{Error, ParseError, Result};
pub use levels::{count_dterms, prime_level, psp_level, Measure};
pub use semantics::{check_proof, ipt, mgt, mgt_global, AxiomAssignment, Problem};
pub use term::{subsumes, unify, variant, FTerm, Position, Substitution, Var};
pub use analysis::{analyze, AnalysisOptions, Concordance, PropertyRow};
pub use prover::{enumerate_lemmas, prove, EnumPolicy, PolicyKind, ProveOutcome};
pub use reduce::{n_simplify, normalize, NormalizeOptions, ReductionKind};
