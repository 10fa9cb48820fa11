use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{PatternError, PatternSpec, Shape};
use crate::network::{Event, EventKind, NONE};

/// Canonical representative of an unranked pattern shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalPattern {
    /// Text encoding of `spec`, e.g. `k=2;R0,1;R0,2`.
    pub key: String,
    /// The lexicographically smallest spec describing the shape.
    pub spec: PatternSpec,
    /// Number of symmetries of the shape (event permutations with child and
    /// parent swaps mapping the shape onto itself).
    pub automorphisms: u64,
}

pub fn canonicalize(p: &PatternSpec) -> Result<CanonicalPattern, PatternError> {
    Ok(canonical_shape(&p.shape()?))
}

type Token = (u8, usize, usize);

/// Replays events in the given order with the given swap flags.
struct Replay<'a> {
    shape: &'a Shape,
    k: usize,
    open: Vec<u32>,
    next_label: usize,
    // position of each lineage in `open`, NONE if not open
    position: Vec<u32>,
}

impl<'a> Replay<'a> {
    fn new(shape: &'a Shape) -> Self {
        let k = shape.initial_lineages().count();
        Self {
            shape,
            k,
            open: alloc::vec![NONE; k],
            next_label: 0,
            position: alloc::vec![NONE; shape.lineages.len()],
        }
    }

    fn locate(&mut self, l: u32) -> usize {
        if self.position[l as usize] == NONE {
            // first use of an initial lineage
            let label = self.next_label;
            self.next_label += 1;
            self.open[label] = l;
            self.position[l as usize] = label as u32;
        }
        self.position[l as usize] as usize
    }

    fn place(&mut self, at: usize, l: u32) {
        if at == self.open.len() {
            self.open.push(l);
        } else {
            self.open[at] = l;
        }
        self.position[l as usize] = at as u32;
    }

    fn apply(&mut self, e: usize, flip: bool) -> Token {
        let ev = self.shape.events[e];
        let f = flip as usize;
        match ev.kind {
            EventKind::Branch => {
                let p = self.locate(ev.inputs[0]);
                let end = self.open.len();
                self.place(p, ev.outputs[f]);
                self.place(end, ev.outputs[1 - f]);
                (0, p, 0)
            }
            EventKind::Retic => {
                let a = self.locate(ev.inputs[f]);
                let b = self.locate(ev.inputs[1 - f]);
                let end = self.open.len();
                self.place(a, ev.outputs[f]);
                self.place(b, ev.outputs[1 - f]);
                self.place(end, ev.outputs[2]);
                (1, a, b)
            }
        }
    }

    fn snapshot(&self) -> (Vec<u32>, usize, Vec<u32>) {
        (self.open.clone(), self.next_label, self.position.clone())
    }

    fn restore(&mut self, s: &(Vec<u32>, usize, Vec<u32>)) {
        self.open.clone_from(&s.0);
        self.next_label = s.1;
        self.position.clone_from(&s.2);
    }
}

fn to_spec(k: usize, tokens: &[Token]) -> PatternSpec {
    let events = tokens
        .iter()
        .map(|&(kind, a, b)| {
            if kind == 0 {
                Event::Branch(a)
            } else {
                Event::Retic(a, b)
            }
        })
        .collect();
    PatternSpec {
        initial_lineages: k,
        events,
    }
}

/// Spec replaying the shape in index order without swaps. Event indices of a
/// shape are always a topological order.
pub(super) fn spec_in_order(shape: &Shape) -> PatternSpec {
    let mut replay = Replay::new(shape);
    let tokens: Vec<Token> = (0..shape.events.len())
        .map(|e| replay.apply(e, false))
        .collect();
    to_spec(replay.k, &tokens)
}

struct Search<'a> {
    replay: Replay<'a>,
    placed: Vec<bool>,
    prefix: Vec<Token>,
    best: Option<Vec<Token>>,
    ties: u64,
}

impl Search<'_> {
    fn ready(&self, e: usize) -> bool {
        let ev = &self.replay.shape.events[e];
        ev.inputs[..ev.kind.inputs()].iter().all(|&l| {
            match self.replay.shape.lineages[l as usize].producer {
                None => true,
                Some((p, _)) => self.placed[p as usize],
            }
        })
    }

    // prefix compared with the same-length prefix of the best sequence
    fn worse_than_best(&self) -> bool {
        match &self.best {
            Some(best) => self.prefix[..] > best[..self.prefix.len()],
            None => false,
        }
    }

    fn run(&mut self) {
        let h = self.placed.len();
        if self.prefix.len() == h {
            match &self.best {
                Some(best) if self.prefix == *best => self.ties += 1,
                Some(best) if self.prefix > *best => {}
                _ => {
                    self.best = Some(self.prefix.clone());
                    self.ties = 1;
                }
            }
            return;
        }
        for e in 0..h {
            if self.placed[e] || !self.ready(e) {
                continue;
            }
            for flip in [false, true] {
                let saved = self.replay.snapshot();
                let token = self.replay.apply(e, flip);
                self.prefix.push(token);
                if !self.worse_than_best() {
                    self.placed[e] = true;
                    self.run();
                    self.placed[e] = false;
                }
                self.prefix.pop();
                self.replay.restore(&saved);
            }
        }
    }
}

/// Canonical form of a connected shape.
pub(super) fn canonical_shape(shape: &Shape) -> CanonicalPattern {
    let h = shape.events.len();
    let mut search = Search {
        replay: Replay::new(shape),
        placed: alloc::vec![false; h],
        prefix: Vec::with_capacity(h),
        best: None,
        ties: 0,
    };
    search.run();
    let k = search.replay.k;
    let best = search.best.unwrap_or_default();
    let spec = to_spec(k, &best);
    let mut key = String::new();
    let _ = write!(key, "k={k};");
    for (i, ev) in spec.events.iter().enumerate() {
        if i > 0 {
            key.push(';');
        }
        let _ = match ev {
            Event::Branch(a) => write!(key, "B{a}"),
            Event::Retic(a, b) => write!(key, "R{a},{b}"),
        };
    }
    CanonicalPattern {
        key,
        spec,
        automorphisms: search.ties.max(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn canon(k: usize, events: Vec<Event>) -> CanonicalPattern {
        canonicalize(&PatternSpec::new(k, events).unwrap()).unwrap()
    }

    #[test]
    fn trident_parent_swap() {
        let a = canon(2, vec![Event::Retic(0, 1)]);
        let b = canon(2, vec![Event::Retic(1, 0)]);
        assert_eq!(a.key, b.key);
        assert_eq!(a.automorphisms, 2);
    }

    #[test]
    fn cherry_is_not_trident() {
        let cherry = canon(1, vec![Event::Branch(0)]);
        assert_eq!(cherry.key, "k=1;B0");
        assert_eq!(cherry.automorphisms, 2);
        assert_ne!(cherry.key, canon(2, vec![Event::Retic(0, 1)]).key);
    }

    #[test]
    fn child_swap_gives_same_key() {
        // branch twice on the left child vs on the right child
        let left = canon(1, vec![Event::Branch(0), Event::Branch(0)]);
        let right = canon(1, vec![Event::Branch(0), Event::Branch(1)]);
        assert_eq!(left.key, right.key);
        assert_eq!(left.automorphisms, 2);
    }

    #[test]
    fn initial_lineage_relabeling() {
        // reticulation child joined with a third lineage, lineages listed differently
        let a = canon(3, vec![Event::Retic(0, 1), Event::Retic(3, 2)]);
        let b = canon(3, vec![Event::Retic(1, 2), Event::Retic(0, 3)]);
        assert_eq!(a.key, b.key);
    }

    #[test]
    fn independent_events_in_either_order() {
        let a = canon(
            2,
            vec![Event::Branch(0), Event::Branch(1), Event::Retic(0, 1)],
        );
        let b = canon(
            2,
            vec![Event::Branch(1), Event::Branch(0), Event::Retic(1, 0)],
        );
        assert_eq!(a.key, b.key);
        // swapping the two halves, or the reticulation's parents, or both
        assert_eq!(a.automorphisms, 2);
    }

    #[test]
    fn canonical_spec_is_a_fixed_point() {
        let c = canon(
            4,
            vec![Event::Retic(0, 1), Event::Retic(2, 3), Event::Retic(0, 2)],
        );
        assert_eq!(canonicalize(&c.spec).unwrap(), c);
    }

    #[test]
    fn trivial_pattern() {
        let c = canonicalize(&PatternSpec::trivial()).unwrap();
        assert_eq!(c.key, "k=1;");
        assert_eq!(c.automorphisms, 1);
    }
}
