//! Ranked tree-child networks built by the forward construction.
//!
//! A network is stored as its [`EventLog`] (the source of truth) together with
//! a lineage-level structure derived from it by replaying the log. The
//! node-level DAG used for validation and export is derived on demand with
//! [`Network::dag`].
//!
//! Placement convention for a step on the ordered list of open lineages:
//! a branching on position `i` replaces `i` by its left child and appends the
//! right child; a reticulation on `(i, j)` replaces `i` and `j` by the outer
//! children of the two new tree nodes and appends the child of the
//! reticulation node.

mod build;
mod dag;
mod enumerate;

use alloc::vec::Vec;
use core::fmt;

pub use build::{generate, generate_with, EventKind, EventNode, LineageNode, Network, NONE};
pub use dag::{Dag, DagNode, NodeKind, ValidationReport, Violation};
pub use enumerate::{enumerate_histories, history_count, Histories, MAX_ENUMERATION_LEAVES};

/// The partially built network during the forward construction.
pub type ConstructionState = Network;

/// One step of the forward construction, addressed by positions in the list
/// of open lineages at that step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    /// Branching event on the lineage at this position.
    Branch(usize),
    /// Reticulation event joining the lineages at two distinct positions.
    Retic(usize, usize),
}

impl Event {
    /// Event selected by the ordered pair `(i, j)`: branching when equal.
    pub fn from_pair(i: usize, j: usize) -> Self {
        if i == j {
            Event::Branch(i)
        } else {
            Event::Retic(i, j)
        }
    }

    pub fn kind(&self) -> EventKind {
        match self {
            Event::Branch(_) => EventKind::Branch,
            Event::Retic(..) => EventKind::Retic,
        }
    }

    /// Checks positions against a lineage list of length `open`.
    pub fn check(&self, open: usize) -> Result<(), NetError> {
        match *self {
            Event::Branch(i) if i >= open => {
                Err(NetError::PositionOutOfRange { position: i, open })
            }
            Event::Retic(i, j) if i >= open || j >= open => Err(NetError::PositionOutOfRange {
                position: i.max(j),
                open,
            }),
            Event::Retic(i, j) if i == j => Err(NetError::RepeatedPosition(i)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Branch(i) => write!(f, "B {i}"),
            Event::Retic(i, j) => write!(f, "R {i} {j}"),
        }
    }
}

/// Errors raised while building networks.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetError {
    #[error("position {position} out of range for {open} open lineages")]
    PositionOutOfRange { position: usize, open: usize },
    #[error("reticulation uses position {0} twice")]
    RepeatedPosition(usize),
    #[error("a network needs at least 2 leaves, got {0}")]
    TooFewLeaves(usize),
    #[error("history enumeration is limited to {max} leaves, got {n}")]
    EnumerationTooLarge { n: usize, max: usize },
}

/// Events after the implicit initial branching, in rank order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a log, checking every event against the lineage count at its step.
    pub fn from_events(events: Vec<Event>) -> Result<Self, NetError> {
        for (step, ev) in events.iter().enumerate() {
            ev.check(step + 2)?;
        }
        Ok(Self { events })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Number of leaves of the described network.
    pub fn leaves(&self) -> usize {
        self.events.len() + 2
    }

    pub(crate) fn push(&mut self, ev: Event) {
        self.events.push(ev);
    }
}
