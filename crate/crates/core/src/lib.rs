//! KBO termination proving through SAT and pseudo-boolean encodings.
//!
//! A rewrite system is parsed ([`parse`]), its KBO orientability is encoded
//! either as one propositional formula ([`encode`]) or as pseudo-boolean
//! constraints ([`pb`]), the result is solved by the embedded CDCL solver
//! ([`solver`]), and any model is decoded and re-checked against a direct
//! implementation of the order ([`kbo`], [`proof`]) before a proof is
//! reported ([`prover`]).

pub mod batch;
pub mod corpus;
pub mod encode;
pub mod kbo;
pub mod logic;
pub mod parse;
pub mod pb;
pub mod proof;
pub mod prover;
pub mod random;
pub mod solver;
pub mod term;

pub use kbo::{KboProof, Precedence, PrecedenceMode, WeightFunction};
pub use proof::EngineKind;
pub use prover::{prove, RunConfig, Verdict};
pub use term::{Rule, Symbol, SystemKind, Term, Trs};
