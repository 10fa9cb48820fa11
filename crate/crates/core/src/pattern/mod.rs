//! Fringe patterns: specification, canonical form, occurrence counting.
//!
//! A pattern is written like a small construction history: `k` initial
//! lineages and a sequence of events addressed by positions in the pattern's
//! own open-lineage list (same convention as [`crate::network`]). Matching is
//! unranked: only the shape matters, never the relative ranks of the events.

mod brute;
mod canon;
mod catalog;
mod matcher;

use alloc::vec::Vec;
use core::fmt;

use crate::network::{Event, EventKind, EventNode, LineageNode, Network, NONE};

pub use brute::{count_occurrences_bruteforce, BRUTE_MAX_EVENTS, BRUTE_MAX_HEIGHT};
pub use canon::{canonicalize, CanonicalPattern};
pub use catalog::{catalog, named_catalog, PatternId};
pub use matcher::{count_occurrences, Matcher};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("a pattern needs at least one initial lineage")]
    NoLineages,
    #[error("event {step} uses position {position} but only {open} lineages are open")]
    BadPosition {
        step: usize,
        position: usize,
        open: usize,
    },
    #[error("event {step} is a reticulation on a single position")]
    RepeatedPosition { step: usize },
    #[error("pattern is not connected")]
    Disconnected,
    #[error("event {0} is not maximal")]
    NotMaximal(usize),
    #[error("pattern height {height} exceeds the limit {max}")]
    TooHigh { height: usize, max: usize },
    #[error("host has {events} events, brute force is limited to {max}")]
    HostTooLarge { events: usize, max: usize },
    #[error("unknown pattern id `{0}`")]
    UnknownId(alloc::string::String),
}

/// `k` initial lineages followed by events in slot notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternSpec {
    pub initial_lineages: usize,
    pub events: Vec<Event>,
}

impl PatternSpec {
    /// Validated constructor.
    pub fn new(initial_lineages: usize, events: Vec<Event>) -> Result<Self, PatternError> {
        let spec = Self {
            initial_lineages,
            events,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The single bare lineage.
    pub fn trivial() -> Self {
        Self {
            initial_lineages: 1,
            events: Vec::new(),
        }
    }

    pub fn height(&self) -> usize {
        self.events.len()
    }

    /// Number of final (external) lineages: every event adds exactly one.
    pub fn footprint(&self) -> usize {
        self.initial_lineages + self.events.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.initial_lineages == 1 && self.events.is_empty()
    }

    fn check_slots(&self) -> Result<(), PatternError> {
        if self.initial_lineages == 0 {
            return Err(PatternError::NoLineages);
        }
        for (step, ev) in self.events.iter().enumerate() {
            let open = self.initial_lineages + step;
            match *ev {
                Event::Branch(i) if i >= open => {
                    return Err(PatternError::BadPosition {
                        step,
                        position: i,
                        open,
                    })
                }
                Event::Retic(i, j) if i.max(j) >= open => {
                    return Err(PatternError::BadPosition {
                        step,
                        position: i.max(j),
                        open,
                    })
                }
                Event::Retic(i, j) if i == j => {
                    return Err(PatternError::RepeatedPosition { step })
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Checks slot indices and connectivity.
    pub fn validate(&self) -> Result<(), PatternError> {
        self.check_slots()?;
        if Shape::build(self).components().len() != 1 {
            return Err(PatternError::Disconnected);
        }
        Ok(())
    }

    /// Lineage-level structure of the pattern.
    pub fn shape(&self) -> Result<Shape, PatternError> {
        self.validate()?;
        Ok(Shape::build(self))
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}", self.initial_lineages)?;
        for ev in &self.events {
            match ev {
                Event::Branch(i) => write!(f, "; B {i}")?,
                Event::Retic(i, j) => write!(f, "; R {i} {j}")?,
            }
        }
        Ok(())
    }
}

/// Read access to event/lineage incidence, shared by networks and patterns.
pub trait Host {
    fn events(&self) -> &[EventNode];
    fn lineages(&self) -> &[LineageNode];

    #[inline]
    fn is_external(&self, l: u32) -> bool {
        self.lineages()[l as usize].consumer.is_none()
    }
}

impl Host for Network {
    #[inline]
    fn events(&self) -> &[EventNode] {
        Network::events(self)
    }
    #[inline]
    fn lineages(&self) -> &[LineageNode] {
        Network::lineages(self)
    }
}

/// Pattern events and lineages with explicit incidence.
///
/// Lineages without a producer are the initial lineages, lineages without a
/// consumer are the final ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub events: Vec<EventNode>,
    pub lineages: Vec<LineageNode>,
}

impl Host for Shape {
    fn events(&self) -> &[EventNode] {
        &self.events
    }
    fn lineages(&self) -> &[LineageNode] {
        &self.lineages
    }
}

impl Shape {
    /// Replays a spec whose slots are known to be valid.
    fn build(spec: &PatternSpec) -> Self {
        let k = spec.initial_lineages;
        let mut lineages: Vec<LineageNode> = (0..k)
            .map(|_| LineageNode {
                producer: None,
                consumer: None,
            })
            .collect();
        let mut open: Vec<u32> = (0..k as u32).collect();
        let mut events = Vec::with_capacity(spec.events.len());
        for (e, ev) in spec.events.iter().enumerate() {
            let e = e as u32;
            let mut fresh = |role: u8| {
                lineages.push(LineageNode {
                    producer: Some((e, role)),
                    consumer: None,
                });
                (lineages.len() - 1) as u32
            };
            match *ev {
                Event::Branch(i) => {
                    let x = open[i];
                    let (l, r) = (fresh(0), fresh(1));
                    lineages[x as usize].consumer = Some((e, 0));
                    open[i] = l;
                    open.push(r);
                    events.push(EventNode {
                        kind: EventKind::Branch,
                        inputs: [x, NONE],
                        outputs: [l, r, NONE],
                    });
                }
                Event::Retic(i, j) => {
                    let (x, y) = (open[i], open[j]);
                    let (ox, oy, c) = (fresh(0), fresh(1), fresh(2));
                    lineages[x as usize].consumer = Some((e, 0));
                    lineages[y as usize].consumer = Some((e, 1));
                    open[i] = ox;
                    open[j] = oy;
                    open.push(c);
                    events.push(EventNode {
                        kind: EventKind::Retic,
                        inputs: [x, y],
                        outputs: [ox, oy, c],
                    });
                }
            }
        }
        Self { events, lineages }
    }

    pub fn height(&self) -> usize {
        self.events.len()
    }

    pub fn initial_lineages(&self) -> impl Iterator<Item = u32> + '_ {
        self.lineages
            .iter()
            .enumerate()
            .filter(|(_, l)| l.producer.is_none())
            .map(|(i, _)| i as u32)
    }

    pub fn final_lineages(&self) -> impl Iterator<Item = u32> + '_ {
        self.lineages
            .iter()
            .enumerate()
            .filter(|(_, l)| l.consumer.is_none())
            .map(|(i, _)| i as u32)
    }

    pub fn footprint(&self) -> usize {
        self.final_lineages().count()
    }

    /// Whether every output of event `e` is final.
    pub fn is_maximal(&self, e: usize) -> bool {
        let ev = &self.events[e];
        ev.outputs[..ev.kind.outputs()]
            .iter()
            .all(|&l| self.is_external(l))
    }

    pub fn maximal_events(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.events.len()).filter(|&e| self.is_maximal(e))
    }

    /// Connected components as `(lineages, events)`, each sorted.
    pub fn components(&self) -> Vec<(Vec<u32>, Vec<u32>)> {
        let mut parent: Vec<usize> = (0..self.lineages.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for ev in &self.events {
            let first = ev.inputs[0] as usize;
            let ins = &ev.inputs[..ev.kind.inputs()];
            let outs = &ev.outputs[..ev.kind.outputs()];
            for &l in ins.iter().chain(outs) {
                let (a, b) = (find(&mut parent, first), find(&mut parent, l as usize));
                parent[a] = b;
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut comps: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
        for l in 0..self.lineages.len() {
            let r = find(&mut parent, l);
            let idx = match roots.iter().position(|&x| x == r) {
                Some(i) => i,
                None => {
                    roots.push(r);
                    comps.push((Vec::new(), Vec::new()));
                    roots.len() - 1
                }
            };
            comps[idx].0.push(l as u32);
        }
        for (e, ev) in self.events.iter().enumerate() {
            let r = find(&mut parent, ev.inputs[0] as usize);
            let idx = roots
                .iter()
                .position(|&x| x == r)
                .expect("component of event input");
            comps[idx].1.push(e as u32);
        }
        comps
    }

    /// Sub-shape spanned by the given events and lineages, re-indexed.
    fn restrict(&self, lineages: &[u32], events: &[u32]) -> Shape {
        let lmap = |l: u32| lineages.binary_search(&l).ok().map(|i| i as u32);
        let emap = |e: u32| events.binary_search(&e).ok().map(|i| i as u32);
        let remap_end = |end: Option<(u32, u8)>| end.and_then(|(e, r)| emap(e).map(|e| (e, r)));
        let new_lineages = lineages
            .iter()
            .map(|&l| {
                let node = self.lineages[l as usize];
                LineageNode {
                    producer: remap_end(node.producer),
                    consumer: remap_end(node.consumer),
                }
            })
            .collect();
        let map_slot = |l: u32| {
            if l == NONE {
                NONE
            } else {
                lmap(l).expect("lineage in component")
            }
        };
        let new_events = events
            .iter()
            .map(|&e| {
                let ev = self.events[e as usize];
                EventNode {
                    kind: ev.kind,
                    inputs: ev.inputs.map(map_slot),
                    outputs: ev.outputs.map(map_slot),
                }
            })
            .collect();
        Shape {
            events: new_events,
            lineages: new_lineages,
        }
    }

    /// Removes event `e` (which must be maximal) and returns the connected
    /// components of what remains.
    pub fn remove_event(&self, e: usize) -> Result<Vec<Shape>, PatternError> {
        if e >= self.events.len() || !self.is_maximal(e) {
            return Err(PatternError::NotMaximal(e));
        }
        let ev = self.events[e];
        let mut rest = self.clone();
        for &l in &ev.inputs[..ev.kind.inputs()] {
            rest.lineages[l as usize].consumer = None;
        }
        let outs = &ev.outputs[..ev.kind.outputs()];
        let keep_l: Vec<u32> = (0..self.lineages.len() as u32)
            .filter(|l| !outs.contains(l))
            .collect();
        let keep_e: Vec<u32> = (0..self.events.len() as u32)
            .filter(|&x| x as usize != e)
            .collect();
        let rest = rest.restrict(&keep_l, &keep_e);
        Ok(rest
            .components()
            .iter()
            .map(|(ls, es)| rest.restrict(ls, es))
            .collect())
    }

    /// A spec describing this shape, replaying events in a topological order.
    pub fn to_spec(&self) -> PatternSpec {
        canon::spec_in_order(self)
    }
}

/// Removes the last event of `p` and returns one or two connected patterns.
///
/// Bare lineages come back as the trivial pattern.
pub fn decompose_last_event(p: &PatternSpec) -> Result<Vec<PatternSpec>, PatternError> {
    let shape = p.shape()?;
    if shape.height() == 0 {
        return Err(PatternError::NotMaximal(0));
    }
    Ok(shape
        .remove_event(shape.height() - 1)?
        .iter()
        .map(Shape::to_spec)
        .collect())
}

/// Same as [`decompose_last_event`] for any maximal event of the shape.
pub fn decompose_at(p: &PatternSpec, event: usize) -> Result<Vec<PatternSpec>, PatternError> {
    let shape = p.shape()?;
    Ok(shape
        .remove_event(event)?
        .iter()
        .map(Shape::to_spec)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn footprints_of_small_patterns() {
        assert_eq!(PatternSpec::trivial().footprint(), 1);
        let cherry = PatternSpec::new(1, vec![Event::Branch(0)]).unwrap();
        assert_eq!(cherry.footprint(), 2);
        assert_eq!(cherry.shape().unwrap().footprint(), 2);
        let trident = PatternSpec::new(2, vec![Event::Retic(0, 1)]).unwrap();
        assert_eq!(trident.shape().unwrap().footprint(), 3);
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert_eq!(PatternSpec::new(0, vec![]), Err(PatternError::NoLineages));
        assert!(matches!(
            PatternSpec::new(1, vec![Event::Branch(1)]),
            Err(PatternError::BadPosition { .. })
        ));
        assert_eq!(
            PatternSpec::new(2, vec![Event::Branch(0)]),
            Err(PatternError::Disconnected)
        );
        assert_eq!(PatternSpec::new(2, vec![]), Err(PatternError::Disconnected));
    }

    #[test]
    fn decompose_cherry_and_trident() {
        let cherry = PatternSpec::new(1, vec![Event::Branch(0)]).unwrap();
        assert_eq!(
            decompose_last_event(&cherry).unwrap(),
            vec![PatternSpec::trivial()]
        );
        let trident = PatternSpec::new(2, vec![Event::Retic(0, 1)]).unwrap();
        assert_eq!(
            decompose_last_event(&trident).unwrap(),
            vec![PatternSpec::trivial(), PatternSpec::trivial()]
        );
    }

    #[test]
    fn components_split_after_removal() {
        // branch on lineage 0, then join its left child with lineage 1
        let p = PatternSpec::new(2, vec![Event::Branch(0), Event::Retic(0, 1)]).unwrap();
        let parts = decompose_last_event(&p).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(parts.contains(&PatternSpec::trivial()));
        assert!(parts.contains(&PatternSpec {
            initial_lineages: 1,
            events: vec![Event::Branch(0)]
        }));
    }

    #[test]
    fn non_maximal_event_cannot_be_removed() {
        let p = PatternSpec::new(1, vec![Event::Branch(0), Event::Branch(0)]).unwrap();
        assert_eq!(decompose_at(&p, 0), Err(PatternError::NotMaximal(0)));
    }
}
