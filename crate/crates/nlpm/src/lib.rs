//! Adaptive matching automata for first-order patterns.
//!
//! Linear pattern sets compile to APMAs, sets of consistency partitions to
//! consistency automata (CAs), and arbitrary pattern sets to ANPMAs, which
//! interleave symbol inspections with subterm comparisons. All three share
//! one [`Automaton`] representation and one evaluator, and everything is
//! checked against the brute-force oracle in [`matching`].

pub mod anpma;
pub mod apma;
pub mod automaton;
pub mod ca;
pub mod efficiency;
pub mod error;
pub mod knowledge;
pub mod matching;
pub mod position;
pub mod rename;
pub mod strategy;
pub mod term;
pub mod textio;
pub mod universe;

pub use anpma::{construct_anpma, detect_redundant_anpma, two_phase_baseline, Pruning, Redundancy};
pub use apma::{construct_apma, eval_apma};
pub use automaton::{
    check_well_formed, Action, Automaton, Edge, EvalTrace, Kind, StateId, StateKind,
};
pub use ca::{construct_ca, detect_redundant, eval_ca, match_two_phase, remove_redundant};
pub use efficiency::{compare_efficiency, Comparison, Verdict};
pub use error::{BuildError, CompareError, EvalError, ParseError, TermError, UniverseError};
pub use matching::{match_naive, matches, IndexedPattern};
pub use position::{Position, PositionPair};
pub use rename::{rename, ConsistencyPartition, RenamedPattern};
pub use strategy::{Choice, Scripted, Strategy};
pub use term::{Signature, Symbol, Term};
