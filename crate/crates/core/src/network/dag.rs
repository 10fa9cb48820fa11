use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::build::{EventKind, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Root,
    Tree,
    Reticulation,
    Leaf,
}

impl NodeKind {
    /// Required `(in-degree, out-degree)`.
    pub fn degrees(self) -> (usize, usize) {
        match self {
            NodeKind::Root => (0, 1),
            NodeKind::Tree => (1, 2),
            NodeKind::Reticulation => (2, 1),
            NodeKind::Leaf => (1, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DagNode {
    pub kind: NodeKind,
    /// Rank of the event the node belongs to (the initial branching has rank 1).
    pub rank: Option<u32>,
}

/// Node-level view of a network: root, tree nodes, reticulation nodes, leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    pub nodes: Vec<DagNode>,
    pub edges: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RootCount(usize),
    Degree {
        node: u32,
        kind: NodeKind,
        indegree: usize,
        outdegree: usize,
    },
    /// Every child of this non-leaf node is a reticulation node.
    NotTreeChild {
        node: u32,
    },
    ParallelEdge {
        from: u32,
        to: u32,
    },
    EdgeOutOfRange {
        from: u32,
        to: u32,
    },
    Cycle,
    EventCount {
        events: usize,
        leaves: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Dag {
    pub fn new(nodes: Vec<DagNode>, edges: Vec<(u32, u32)>) -> Self {
        Self { nodes, edges }
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    /// Checks node degrees, acyclicity, the tree-child property and that the
    /// number of events is one less than the number of leaves.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.nodes.len();
        let mut indeg = alloc::vec![0usize; n];
        let mut children: Vec<Vec<u32>> = alloc::vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a as usize >= n || b as usize >= n {
                violations.push(Violation::EdgeOutOfRange { from: a, to: b });
                continue;
            }
            if !seen.insert((a, b)) {
                violations.push(Violation::ParallelEdge { from: a, to: b });
            }
            indeg[b as usize] += 1;
            children[a as usize].push(b);
        }

        let roots = self.count(NodeKind::Root);
        if roots != 1 {
            violations.push(Violation::RootCount(roots));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            let (want_in, want_out) = node.kind.degrees();
            let (got_in, got_out) = (indeg[i], children[i].len());
            if (got_in, got_out) != (want_in, want_out) {
                violations.push(Violation::Degree {
                    node: i as u32,
                    kind: node.kind,
                    indegree: got_in,
                    outdegree: got_out,
                });
            }
            if node.kind != NodeKind::Leaf
                && !children[i].is_empty()
                && children[i]
                    .iter()
                    .all(|&c| self.nodes[c as usize].kind == NodeKind::Reticulation)
            {
                violations.push(Violation::NotTreeChild { node: i as u32 });
            }
        }

        // Kahn's algorithm
        let mut remaining = indeg.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&i| remaining[i] == 0).collect();
        let mut visited = 0;
        while let Some(v) = stack.pop() {
            visited += 1;
            for &c in &children[v] {
                remaining[c as usize] -= 1;
                if remaining[c as usize] == 0 {
                    stack.push(c as usize);
                }
            }
        }
        if visited != n {
            violations.push(Violation::Cycle);
        }

        let tree = self.count(NodeKind::Tree);
        let retic = self.count(NodeKind::Reticulation);
        let events = tree.saturating_sub(retic);
        let leaves = self.count(NodeKind::Leaf);
        if events + 1 != leaves {
            violations.push(Violation::EventCount { events, leaves });
        }
        ValidationReport { violations }
    }
}

impl Network {
    /// Derives the node-level DAG.
    ///
    /// Node 0 is the root; each branching contributes one tree node, each
    /// reticulation two tree nodes followed by its reticulation node; leaves
    /// come last in open-lineage order.
    pub fn dag(&self) -> Dag {
        let mut nodes = alloc::vec![DagNode {
            kind: NodeKind::Root,
            rank: None
        }];
        // first node of each event
        let mut base = Vec::with_capacity(self.events().len());
        for (e, ev) in self.events().iter().enumerate() {
            base.push(nodes.len() as u32);
            let rank = Some(e as u32 + 1);
            match ev.kind {
                EventKind::Branch => nodes.push(DagNode {
                    kind: NodeKind::Tree,
                    rank,
                }),
                EventKind::Retic => {
                    nodes.push(DagNode {
                        kind: NodeKind::Tree,
                        rank,
                    });
                    nodes.push(DagNode {
                        kind: NodeKind::Tree,
                        rank,
                    });
                    nodes.push(DagNode {
                        kind: NodeKind::Reticulation,
                        rank,
                    });
                }
            }
        }
        let mut edges = Vec::with_capacity(self.lineages().len() + 2 * self.reticulations());
        for (e, ev) in self.events().iter().enumerate() {
            if ev.kind == EventKind::Retic {
                edges.push((base[e], base[e] + 2));
                edges.push((base[e] + 1, base[e] + 2));
            }
        }
        let events = self.events();
        let endpoint = |(e, role): (u32, u8)| match events[e as usize].kind {
            EventKind::Branch => base[e as usize],
            EventKind::Retic => base[e as usize] + role as u32,
        };
        for lin in self.lineages() {
            let from = lin.producer.map_or(0, endpoint);
            let to = match lin.consumer {
                Some(c) => endpoint(c),
                None => {
                    nodes.push(DagNode {
                        kind: NodeKind::Leaf,
                        rank: None,
                    });
                    (nodes.len() - 1) as u32
                }
            };
            edges.push((from, to));
        }
        Dag { nodes, edges }
    }

    pub fn validate(&self) -> ValidationReport {
        self.dag().validate()
    }
}
