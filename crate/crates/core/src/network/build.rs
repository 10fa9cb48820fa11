use alloc::vec::Vec;

use super::{Event, EventLog, NetError};
use crate::rng::{self, RngCore};

/// Placeholder for unused input/output slots.
pub const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Branch,
    Retic,
}

impl EventKind {
    pub fn inputs(self) -> usize {
        match self {
            EventKind::Branch => 1,
            EventKind::Retic => 2,
        }
    }

    pub fn outputs(self) -> usize {
        match self {
            EventKind::Branch => 2,
            EventKind::Retic => 3,
        }
    }
}

/// An event of a built network with the lineages it consumes and creates.
///
/// Output roles: a branching has `[left, right]`; a reticulation has
/// `[outer child of input 0, outer child of input 1, reticulation child]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventNode {
    pub kind: EventKind,
    pub inputs: [u32; 2],
    pub outputs: [u32; 3],
}

/// Producer and consumer of a lineage as `(event, role)`.
///
/// The root lineage has no producer; external lineages have no consumer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineageNode {
    pub producer: Option<(u32, u8)>,
    pub consumer: Option<(u32, u8)>,
}

/// A ranked tree-child network together with its open lineage list.
///
/// Event `0` is the initial branching on the root lineage `0`; the event log
/// holds every later event in rank order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    log: EventLog,
    events: Vec<EventNode>,
    lineages: Vec<LineageNode>,
    open: Vec<u32>,
}

impl Default for Network {
    fn default() -> Self {
        Self::initial()
    }
}

impl Network {
    /// The unique network with two leaves.
    pub fn initial() -> Self {
        let root = LineageNode {
            producer: None,
            consumer: Some((0, 0)),
        };
        let left = LineageNode {
            producer: Some((0, 0)),
            consumer: None,
        };
        let right = LineageNode {
            producer: Some((0, 1)),
            consumer: None,
        };
        Self {
            log: EventLog::new(),
            events: alloc::vec![EventNode {
                kind: EventKind::Branch,
                inputs: [0, NONE],
                outputs: [1, 2, NONE],
            }],
            lineages: alloc::vec![root, left, right],
            open: alloc::vec![1, 2],
        }
    }

    /// Replays a log from the two-leaf network.
    pub fn from_log(log: &EventLog) -> Self {
        let mut net = Self::with_capacity(log.leaves());
        for &ev in log.events() {
            net.apply_unchecked(ev);
        }
        net
    }

    fn with_capacity(leaves: usize) -> Self {
        let mut net = Self::initial();
        net.events.reserve(leaves);
        net.lineages.reserve(3 * leaves);
        net.log.events_reserve(leaves);
        net
    }

    /// Applies one forward step in place.
    pub fn apply(&mut self, ev: Event) -> Result<(), NetError> {
        ev.check(self.open.len())?;
        self.apply_unchecked(ev);
        Ok(())
    }

    /// Functional form of a forward step on the ordered pair `(i, j)`.
    pub fn forward_step(&self, i: usize, j: usize) -> Result<Self, NetError> {
        let mut next = self.clone();
        next.apply(Event::from_pair(i, j))?;
        Ok(next)
    }

    fn apply_unchecked(&mut self, ev: Event) {
        let e = self.events.len() as u32;
        let fresh = |lineages: &mut Vec<LineageNode>, role: u8| {
            lineages.push(LineageNode {
                producer: Some((e, role)),
                consumer: None,
            });
            (lineages.len() - 1) as u32
        };
        match ev {
            Event::Branch(i) => {
                let x = self.open[i];
                self.lineages[x as usize].consumer = Some((e, 0));
                let left = fresh(&mut self.lineages, 0);
                let right = fresh(&mut self.lineages, 1);
                self.open[i] = left;
                self.open.push(right);
                self.events.push(EventNode {
                    kind: EventKind::Branch,
                    inputs: [x, NONE],
                    outputs: [left, right, NONE],
                });
            }
            Event::Retic(i, j) => {
                let (x, y) = (self.open[i], self.open[j]);
                self.lineages[x as usize].consumer = Some((e, 0));
                self.lineages[y as usize].consumer = Some((e, 1));
                let outer_x = fresh(&mut self.lineages, 0);
                let outer_y = fresh(&mut self.lineages, 1);
                let child = fresh(&mut self.lineages, 2);
                self.open[i] = outer_x;
                self.open[j] = outer_y;
                self.open.push(child);
                self.events.push(EventNode {
                    kind: EventKind::Retic,
                    inputs: [x, y],
                    outputs: [outer_x, outer_y, child],
                });
            }
        }
        self.log.push(ev);
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn leaves(&self) -> usize {
        self.open.len()
    }

    /// Open (external) lineages in list order.
    pub fn open_lineages(&self) -> &[u32] {
        &self.open
    }

    /// All events including the initial branching, indexed by rank − 1.
    pub fn events(&self) -> &[EventNode] {
        &self.events
    }

    pub fn lineages(&self) -> &[LineageNode] {
        &self.lineages
    }

    pub fn reticulations(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Retic)
            .count()
    }

    /// Whether lineage `l` ends in a leaf.
    #[inline]
    pub fn is_external(&self, l: u32) -> bool {
        self.lineages[l as usize].consumer.is_none()
    }
}

impl EventLog {
    fn events_reserve(&mut self, additional: usize) {
        self.events.reserve(additional);
    }
}

/// Grows a network to `n` leaves drawing each ordered pair uniformly from
/// stream 0 of `seed`.
pub fn generate(n: usize, seed: u64) -> Result<Network, NetError> {
    generate_with(n, &mut rng::stream(seed, 0))
}

/// Same as [`generate`] with a caller-supplied generator.
pub fn generate_with<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<Network, NetError> {
    if n < 2 {
        return Err(NetError::TooFewLeaves(n));
    }
    let mut net = Network::with_capacity(n);
    for l in 2..n as u64 {
        let u = rng::below(rng, l * l);
        let (i, j) = ((u / l) as usize, (u % l) as usize);
        net.apply_unchecked(Event::from_pair(i, j));
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branching_step_on_two_leaves() {
        let next = Network::initial().forward_step(0, 0).unwrap();
        assert_eq!(next.leaves(), 3);
        assert_eq!(next.reticulations(), 0);
        assert_eq!(next.log().events(), &[Event::Branch(0)]);
    }

    #[test]
    fn reticulation_step_on_two_leaves() {
        let next = Network::initial().forward_step(0, 1).unwrap();
        assert_eq!(next.leaves(), 3);
        assert_eq!(next.reticulations(), 1);
        assert_eq!(next.dag().count(super::super::NodeKind::Reticulation), 1);
    }

    #[test]
    fn two_steps_by_hand() {
        // (0,1) at 2 lineages, then (2,2): branch on the reticulation child.
        let net = Network::initial()
            .forward_step(0, 1)
            .unwrap()
            .forward_step(2, 2)
            .unwrap();
        assert_eq!(net.leaves(), 4);
        assert_eq!(net.events().len(), 3);
        assert_eq!(net.reticulations(), 1);
        let child = net.events()[1].outputs[2];
        assert_eq!(net.lineages()[child as usize].consumer, Some((2, 0)));
    }

    #[test]
    fn out_of_range_step_is_rejected() {
        assert_eq!(
            Network::initial().forward_step(2, 0),
            Err(NetError::PositionOutOfRange {
                position: 2,
                open: 2
            })
        );
    }

    #[test]
    fn generate_two_leaves_has_no_random_steps() {
        for seed in 0..5 {
            let net = generate(2, seed).unwrap();
            assert_eq!(net, Network::initial());
        }
        assert_eq!(generate(1, 0), Err(NetError::TooFewLeaves(1)));
    }

    #[test]
    fn generate_is_deterministic() {
        assert_eq!(
            generate(1000, 42).unwrap().log(),
            generate(1000, 42).unwrap().log()
        );
        assert_ne!(
            generate(1000, 42).unwrap().log(),
            generate(1000, 43).unwrap().log()
        );
    }

    #[test]
    fn about_half_of_three_leaf_networks_reticulate() {
        let reps = 20_000;
        let hits = (0..reps)
            .filter(|&s| generate(3, s).unwrap().reticulations() == 1)
            .count();
        let p = hits as f64 / reps as f64;
        // SE = sqrt(0.25 / reps) ≈ 0.0035
        assert!((p - 0.5).abs() < 4.0 * 0.0036, "{p}");
    }

    #[test]
    fn replaying_the_log_reproduces_the_network() {
        let net = generate(200, 9).unwrap();
        assert_eq!(Network::from_log(net.log()), net);
    }
}
