//! Text formats: Polish and first-order formulas, D-notation, proof corpora,
//! TPTP CD problems and JSON.

pub mod corpus;
pub mod dnotation;
pub mod json;
pub mod polish;
pub mod tptp;
