//! Compile two-tape Turing machine runs into quantified Boolean formulas,
//! evaluate them, and compare the answers with direct simulation.

pub mod machine;
pub mod formula;
pub mod encoder;
pub mod eval;
pub mod growth;
pub mod recognizer;
