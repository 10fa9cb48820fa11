//! Recursive limit-law classification of fringe patterns.
//!
//! Removing a maximal event from a connected pattern leaves one or two
//! connected patterns. The class of the whole follows from the classes of the
//! pieces: a single normal remainder gives a Poisson pattern, two normal
//! remainders give a normal one, a normal and a Poisson remainder give a
//! Poisson one, and everything else is degenerate. The bare lineage is normal.
//!
//! Only the thirteen catalog patterns have proven laws; every other label is
//! conjectural.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::network::Event;
use crate::pattern::{canonicalize, PatternError, PatternId, PatternSpec};

/// Limit law class, ordered by how common the pattern is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Degenerate,
    Poisson,
    Normal,
}

impl ClassLabel {
    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Degenerate => "degenerate",
            ClassLabel::Poisson => "poisson",
            ClassLabel::Normal => "normal",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the recursion is anchored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseMode {
    /// Only the bare lineage is a base case (normal).
    #[default]
    TrivialNormal,
    /// The cherry (Poisson) and trident (normal) are base cases as well.
    HeightOne,
}

/// Combines remainder classes by the recursion rules.
pub fn combine(parts: &[ClassLabel]) -> ClassLabel {
    use ClassLabel::*;
    match parts {
        [Normal] => Poisson,
        [Normal, Normal] => Normal,
        [Normal, Poisson] | [Poisson, Normal] => Poisson,
        _ => Degenerate,
    }
}

/// Labels reachable for one pattern over all choices of removed events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub key: String,
    pub height: usize,
    /// Label obtained by always removing the last event of the spec.
    pub last_event: ClassLabel,
    /// Labels over every sequence of maximal-event removals.
    pub labels: BTreeSet<ClassLabel>,
    /// False only for the published catalog patterns.
    pub conjectural: bool,
}

impl Classification {
    /// The label if every removal order agrees.
    pub fn label(&self) -> Option<ClassLabel> {
        if self.labels.len() == 1 {
            self.labels.iter().next().copied()
        } else {
            None
        }
    }

    pub fn is_ambiguous(&self) -> bool {
        self.labels.len() > 1
    }
}

/// Memoizing classifier keyed by canonical form.
#[derive(Debug, Clone, Default)]
pub struct Classifier {
    mode: BaseMode,
    last: BTreeMap<String, ClassLabel>,
    all: BTreeMap<String, BTreeSet<ClassLabel>>,
    catalog_keys: BTreeSet<String>,
}

impl Classifier {
    pub fn new(mode: BaseMode) -> Self {
        let catalog_keys = PatternId::ALL
            .iter()
            .map(|id| canonicalize(&id.spec()).expect("catalog pattern").key)
            .collect();
        Self {
            mode,
            catalog_keys,
            ..Self::default()
        }
    }

    pub fn mode(&self) -> BaseMode {
        self.mode
    }

    fn base(&self, p: &PatternSpec) -> Option<ClassLabel> {
        if p.is_trivial() {
            return Some(ClassLabel::Normal);
        }
        if self.mode == BaseMode::HeightOne && p.height() == 1 {
            return Some(match p.events[0] {
                Event::Branch(_) => ClassLabel::Poisson,
                Event::Retic(..) => ClassLabel::Normal,
            });
        }
        None
    }

    /// Class obtained by repeatedly removing the last event of the spec.
    pub fn classify(&mut self, p: &PatternSpec) -> Result<ClassLabel, PatternError> {
        let canon = canonicalize(p)?;
        if let Some(&l) = self.last.get(&canon.key) {
            return Ok(l);
        }
        let label = match self.base(&canon.spec) {
            Some(l) => l,
            None => {
                let parts = crate::pattern::decompose_last_event(p)?;
                let labels = parts
                    .iter()
                    .map(|q| self.classify(q))
                    .collect::<Result<Vec<_>, _>>()?;
                combine(&labels)
            }
        };
        self.last.insert(canon.key, label);
        Ok(label)
    }

    /// Every label reachable over all choices of maximal event at every level.
    pub fn classify_all(&mut self, p: &PatternSpec) -> Result<BTreeSet<ClassLabel>, PatternError> {
        let canon = canonicalize(p)?;
        if let Some(s) = self.all.get(&canon.key) {
            return Ok(s.clone());
        }
        let mut out = BTreeSet::new();
        if let Some(l) = self.base(&canon.spec) {
            out.insert(l);
        } else {
            let shape = canon.spec.shape()?;
            for e in shape.maximal_events().collect::<Vec<_>>() {
                let parts: Vec<PatternSpec> =
                    shape.remove_event(e)?.iter().map(|s| s.to_spec()).collect();
                let sets = parts
                    .iter()
                    .map(|q| self.classify_all(q))
                    .collect::<Result<Vec<_>, _>>()?;
                match sets.as_slice() {
                    [a] => out.extend(a.iter().map(|&x| combine(&[x]))),
                    [a, b] => {
                        for &x in a {
                            out.extend(b.iter().map(|&y| combine(&[x, y])));
                        }
                    }
                    _ => unreachable!("removing one event leaves at most two components"),
                }
            }
        }
        self.all.insert(canon.key, out.clone());
        Ok(out)
    }

    /// Full report for one pattern.
    pub fn classification(&mut self, p: &PatternSpec) -> Result<Classification, PatternError> {
        let key = canonicalize(p)?.key;
        Ok(Classification {
            height: p.height(),
            last_event: self.classify(p)?,
            labels: self.classify_all(p)?,
            conjectural: !self.catalog_keys.contains(&key),
            key,
        })
    }
}

/// Class by the default recursion, removing the last event each time.
pub fn classify(p: &PatternSpec) -> Result<ClassLabel, PatternError> {
    Classifier::new(BaseMode::TrivialNormal).classify(p)
}

/// Recursion labels for the whole catalog.
pub fn classify_catalog(mode: BaseMode) -> BTreeMap<PatternId, ClassLabel> {
    let mut c = Classifier::new(mode);
    PatternId::ALL
        .iter()
        .map(|&id| (id, c.classify(&id.spec()).expect("catalog pattern")))
        .collect()
}

/// Proven limit law of a catalog pattern.
pub fn published_label(id: PatternId) -> ClassLabel {
    use PatternId::*;
    match id {
        Cherry | BI | BII | BIII | BIV | BV => ClassLabel::Poisson,
        Trident | CI | CII | H3CI => ClassLabel::Normal,
        AI | AII | H3BI => ClassLabel::Degenerate,
    }
}

/// Disjoint union of two specs, with the open positions of each part in the
/// combined spec.
fn disjoint_union(a: &PatternSpec, b: &PatternSpec) -> (PatternSpec, Vec<usize>, Vec<usize>) {
    let (ka, kb, ha) = (a.initial_lineages, b.initial_lineages, a.height());
    let map_a = |p: usize| if p < ka { p } else { p + kb };
    let map_b = |p: usize| if p < kb { ka + p } else { p + ka + ha };
    let remap = |ev: &Event, f: &dyn Fn(usize) -> usize| match *ev {
        Event::Branch(i) => Event::Branch(f(i)),
        Event::Retic(i, j) => Event::Retic(f(i), f(j)),
    };
    let mut events: Vec<Event> = a.events.iter().map(|e| remap(e, &map_a)).collect();
    events.extend(b.events.iter().map(|e| remap(e, &map_b)));
    let pos_a = (0..a.footprint()).map(map_a).collect();
    let pos_b = (0..b.footprint()).map(map_b).collect();
    (
        PatternSpec {
            initial_lineages: ka + kb,
            events,
        },
        pos_a,
        pos_b,
    )
}

/// All connected patterns up to `max_height`, one canonical spec per shape,
/// grouped by height.
pub fn enumerate_patterns(max_height: usize) -> Vec<Vec<PatternSpec>> {
    let mut levels: Vec<Vec<PatternSpec>> = alloc::vec![alloc::vec![PatternSpec::trivial()]];
    for h in 1..=max_height {
        let mut seen: BTreeMap<String, PatternSpec> = BTreeMap::new();
        let mut add = |spec: PatternSpec| {
            if let Ok(c) = canonicalize(&spec) {
                seen.entry(c.key).or_insert(c.spec);
            }
        };
        for p in &levels[h - 1] {
            let f = p.footprint();
            for i in 0..f {
                let mut q = p.clone();
                q.events.push(Event::Branch(i));
                add(q);
                for j in i + 1..f {
                    let mut q = p.clone();
                    q.events.push(Event::Retic(i, j));
                    add(q);
                }
            }
        }
        for h1 in 0..h {
            let h2 = h - 1 - h1;
            if h2 < h1 {
                break;
            }
            for a in &levels[h1] {
                for b in &levels[h2] {
                    let (u, pa, pb) = disjoint_union(a, b);
                    for &i in &pa {
                        for &j in &pb {
                            let mut q = u.clone();
                            q.events.push(Event::Retic(i.min(j), i.max(j)));
                            add(q);
                        }
                    }
                }
            }
        }
        levels.push(seen.into_values().collect());
    }
    levels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_matches_published_laws_in_both_modes() {
        for mode in [BaseMode::TrivialNormal, BaseMode::HeightOne] {
            for (id, label) in classify_catalog(mode) {
                assert_eq!(label, published_label(id), "{id} in {mode:?}");
            }
        }
    }

    #[test]
    fn height_one() {
        assert_eq!(
            classify(&PatternId::Cherry.spec()).unwrap(),
            ClassLabel::Poisson
        );
        assert_eq!(
            classify(&PatternId::Trident.spec()).unwrap(),
            ClassLabel::Normal
        );
        assert_eq!(
            classify(&PatternSpec::trivial()).unwrap(),
            ClassLabel::Normal
        );
        assert_eq!(
            classify(&PatternId::H3BI.spec()).unwrap(),
            ClassLabel::Degenerate
        );
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let p = PatternSpec {
            initial_lineages: 2,
            events: alloc::vec![Event::Branch(0)],
        };
        assert_eq!(classify(&p), Err(PatternError::Disconnected));
    }

    #[test]
    fn small_pattern_counts() {
        let levels = enumerate_patterns(2);
        assert_eq!(levels[0].len(), 1);
        assert_eq!(levels[1].len(), 2);
        // nine published height-two shapes
        assert_eq!(levels[2].len(), 9);
    }

    #[test]
    fn catalog_flags() {
        let mut c = Classifier::new(BaseMode::TrivialNormal);
        assert!(
            !c.classification(&PatternId::BIV.spec())
                .unwrap()
                .conjectural
        );
        let q = PatternSpec::new(
            1,
            alloc::vec![Event::Branch(0), Event::Branch(0), Event::Branch(0)],
        )
        .unwrap();
        let r = c.classification(&q).unwrap();
        assert!(r.conjectural);
        assert_eq!(r.label(), Some(ClassLabel::Degenerate));
    }
}
