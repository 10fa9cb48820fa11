use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{PatternError, PatternSpec};
use crate::network::Event::{self, Branch as B, Retic as R};

/// Named patterns: the two height-one patterns, the nine patterns of height
/// two and the two height-three overlap patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternId {
    Cherry,
    Trident,
    AI,
    AII,
    BI,
    BII,
    BIII,
    BIV,
    BV,
    CI,
    CII,
    H3BI,
    H3CI,
}

impl PatternId {
    pub const ALL: [PatternId; 13] = [
        PatternId::Cherry,
        PatternId::Trident,
        PatternId::AI,
        PatternId::AII,
        PatternId::BI,
        PatternId::BII,
        PatternId::BIII,
        PatternId::BIV,
        PatternId::BV,
        PatternId::CI,
        PatternId::CII,
        PatternId::H3BI,
        PatternId::H3CI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PatternId::Cherry => "cherry",
            PatternId::Trident => "trident",
            PatternId::AI => "a-i",
            PatternId::AII => "a-ii",
            PatternId::BI => "b-i",
            PatternId::BII => "b-ii",
            PatternId::BIII => "b-iii",
            PatternId::BIV => "b-iv",
            PatternId::BV => "b-v",
            PatternId::CI => "c-i",
            PatternId::CII => "c-ii",
            PatternId::H3BI => "h3-bi",
            PatternId::H3CI => "h3-ci",
        }
    }

    pub fn spec(self) -> PatternSpec {
        let (k, events): (usize, &[Event]) = match self {
            PatternId::Cherry => (1, &[B(0)]),
            PatternId::Trident => (2, &[R(0, 1)]),
            // caterpillar: branch again on one child
            PatternId::AI => (1, &[B(0), B(0)]),
            // the two children of a branching rejoin
            PatternId::AII => (1, &[B(0), R(0, 1)]),
            // one child of a branching joins an outside lineage
            PatternId::BI => (2, &[B(0), R(0, 1)]),
            // trident with a branching on an outer child
            PatternId::BII => (2, &[R(0, 1), B(0)]),
            // trident with a branching on the reticulation child
            PatternId::BIII => (2, &[R(0, 1), B(2)]),
            // outer child joins the reticulation child
            PatternId::BIV => (2, &[R(0, 1), R(0, 2)]),
            // both outer children rejoin
            PatternId::BV => (2, &[R(0, 1), R(0, 1)]),
            // outer child joins an outside lineage
            PatternId::CI => (3, &[R(0, 1), R(0, 2)]),
            // reticulation child joins an outside lineage
            PatternId::CII => (3, &[R(0, 1), R(3, 2)]),
            // two b-i sharing the reticulation
            PatternId::H3BI => (2, &[B(0), B(1), R(0, 1)]),
            // two c-i sharing the last reticulation
            PatternId::H3CI => (4, &[R(0, 1), R(2, 3), R(0, 2)]),
        };
        PatternSpec {
            initial_lineages: k,
            events: events.to_vec(),
        }
    }

    /// Number of external lineages covered by one occurrence.
    pub fn footprint(self) -> usize {
        self.spec().footprint()
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternId {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| PatternError::UnknownId(s.to_string()))
    }
}

pub fn catalog() -> BTreeMap<PatternId, PatternSpec> {
    PatternId::ALL
        .into_iter()
        .map(|id| (id, id.spec()))
        .collect()
}

/// Catalog entries as `(name, spec)` pairs in catalog order.
pub fn named_catalog() -> Vec<(&'static str, PatternSpec)> {
    PatternId::ALL
        .into_iter()
        .map(|id| (id.name(), id.spec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{canonicalize, decompose_last_event};

    #[test]
    fn footprints_match_table_denominators() {
        let want = [
            (PatternId::Cherry, 2),
            (PatternId::Trident, 3),
            (PatternId::AI, 3),
            (PatternId::AII, 3),
            (PatternId::BI, 4),
            (PatternId::BII, 4),
            (PatternId::BIII, 4),
            (PatternId::BIV, 4),
            (PatternId::BV, 4),
            (PatternId::CI, 5),
            (PatternId::CII, 5),
            (PatternId::H3BI, 5),
            (PatternId::H3CI, 7),
        ];
        for (id, f) in want {
            assert_eq!(id.footprint(), f, "{id}");
            assert_eq!(id.spec().shape().unwrap().footprint(), f, "{id}");
        }
    }

    #[test]
    fn entries_are_valid_and_distinct() {
        let keys: alloc::collections::BTreeSet<_> = catalog()
            .values()
            .map(|s| canonicalize(s).unwrap().key)
            .collect();
        assert_eq!(keys.len(), 13);
    }

    #[test]
    fn names_round_trip() {
        for id in PatternId::ALL {
            assert_eq!(id.name().parse::<PatternId>().unwrap(), id);
        }
        assert!("b-vi".parse::<PatternId>().is_err());
    }

    #[test]
    fn b_iv_contains_a_trident() {
        let parts = decompose_last_event(&PatternId::BIV.spec()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(
            canonicalize(&parts[0]).unwrap().key,
            canonicalize(&PatternId::Trident.spec()).unwrap().key
        );
    }
}
