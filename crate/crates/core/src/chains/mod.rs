//! Multi-type Markov chains on pattern counts.
//!
//! A chain is a [`TransitionTable`]: tracked types with their lineage
//! footprints, and rules pairing an integer change vector with a polynomial
//! numerator over `n²`. Tables are plain data; this module samples them and
//! propagates their exact distributions.

mod exact;
pub mod poly;
mod simulate;
mod table;

use alloc::string::String;
use alloc::vec::Vec;

pub use exact::{
    exact_distribution, ExactChain, ExactDistribution, MomentKind, DEFAULT_STATE_BUDGET,
};
pub use poly::{Poly, PolyError};
pub use simulate::{simulate, ChainState, Sampler};
pub use table::{
    trident_table, ChainType, CompiledTable, RuleSource, Statistic, TableReport, TableViolation,
    TransitionRule, TransitionTable,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("a chain needs at least 2 leaves, got {0}")]
    TooFewLeaves(u64),
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error("rule `{label}`: {error}")]
    Numerator { label: String, error: PolyError },
    #[error("rule `{label}` leads to infeasible counts {counts:?} at n = {n}; check the table transcription")]
    Infeasible {
        label: String,
        n: u64,
        counts: Vec<i64>,
    },
    #[error("rule `{label}` is negative at n = {n}, counts {counts:?}")]
    NegativeRate {
        label: String,
        n: u64,
        counts: Vec<i64>,
    },
    #[error("numerators sum to {total} instead of n² at n = {n}, counts {counts:?}")]
    MassDeficit {
        n: u64,
        counts: Vec<i64>,
        total: i64,
    },
    #[error("{states} states exceed the budget of {budget}")]
    Budget { states: usize, budget: usize },
}
