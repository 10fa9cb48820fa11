use alloc::vec::Vec;

use super::canon::canonical_shape;
use super::{Host, PatternError, PatternSpec, Shape};
use crate::network::EventKind;

/// Largest pattern height accepted by [`Matcher`].
pub const MAX_HEIGHT: usize = 8;

#[derive(Debug, Clone, Copy)]
enum Link {
    /// `event` consumes output `role` of `from` on input slot `slot`.
    Down { from: usize, role: u8, slot: u8 },
    /// `event` produces input `slot` of `from` as its output `role`.
    Up { from: usize, slot: u8, role: u8 },
}

#[derive(Debug, Clone, Copy)]
struct Step {
    event: usize,
    kind: EventKind,
    link: Link,
}

#[inline]
fn out_role(kind: EventKind, role: u8, flip: bool) -> usize {
    match (kind, role) {
        (EventKind::Retic, 2) => 2,
        _ => (role ^ flip as u8) as usize,
    }
}

/// A pattern compiled for repeated counting.
///
/// Every embedding maps the pattern's last event, whose outputs are all final,
/// onto a host event with only external outputs. From there the rest of the
/// pattern is reached along lineages, so the host is scanned once and each
/// anchor is extended in time depending only on the pattern.
#[derive(Debug, Clone)]
pub struct Matcher {
    shape: Shape,
    anchor: usize,
    steps: Vec<Step>,
    automorphisms: u64,
}

impl Matcher {
    pub fn new(p: &PatternSpec) -> Result<Self, PatternError> {
        if p.height() > MAX_HEIGHT {
            return Err(PatternError::TooHigh {
                height: p.height(),
                max: MAX_HEIGHT,
            });
        }
        let shape = p.shape()?;
        let automorphisms = canonical_shape(&shape).automorphisms;
        let h = shape.height();
        let anchor = h.saturating_sub(1);
        let mut steps = Vec::with_capacity(h);
        if h > 0 {
            let mut seen = alloc::vec![false; h];
            seen[anchor] = true;
            let mut queue = alloc::vec![anchor];
            let mut head = 0;
            while head < queue.len() {
                let from = queue[head];
                head += 1;
                let ev = shape.events[from];
                for slot in 0..ev.kind.inputs() {
                    if let Some((p, role)) = shape.lineages[ev.inputs[slot] as usize].producer {
                        let p = p as usize;
                        if !seen[p] {
                            seen[p] = true;
                            queue.push(p);
                            let link = Link::Up {
                                from,
                                slot: slot as u8,
                                role,
                            };
                            steps.push(Step {
                                event: p,
                                kind: shape.events[p].kind,
                                link,
                            });
                        }
                    }
                }
                for role in 0..ev.kind.outputs() {
                    if let Some((c, slot)) = shape.lineages[ev.outputs[role] as usize].consumer {
                        let c = c as usize;
                        if !seen[c] {
                            seen[c] = true;
                            queue.push(c);
                            let link = Link::Down {
                                from,
                                role: role as u8,
                                slot,
                            };
                            steps.push(Step {
                                event: c,
                                kind: shape.events[c].kind,
                                link,
                            });
                        }
                    }
                }
            }
        }
        Ok(Self {
            shape,
            anchor,
            steps,
            automorphisms,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn automorphisms(&self) -> u64 {
        self.automorphisms
    }

    /// Number of occurrences on the fringe of `host`.
    pub fn count<H: Host + ?Sized>(&self, host: &H) -> u64 {
        let h = self.shape.height();
        if h == 0 {
            return host
                .lineages()
                .iter()
                .filter(|l| l.consumer.is_none())
                .count() as u64;
        }
        let kind = self.shape.events[self.anchor].kind;
        let mut map = [0u32; MAX_HEIGHT];
        let mut flips = [false; MAX_HEIGHT];
        let mut embeddings = 0u64;
        for (he, ev) in host.events().iter().enumerate() {
            if ev.kind != kind
                || !ev.outputs[..kind.outputs()]
                    .iter()
                    .all(|&l| host.is_external(l))
            {
                continue;
            }
            map[self.anchor] = he as u32;
            for flip in [false, true] {
                flips[self.anchor] = flip;
                embeddings += self.extend(host, 0, &mut map, &mut flips);
            }
        }
        debug_assert_eq!(embeddings % self.automorphisms, 0);
        embeddings / self.automorphisms
    }

    fn extend<H: Host + ?Sized>(
        &self,
        host: &H,
        depth: usize,
        map: &mut [u32; MAX_HEIGHT],
        flips: &mut [bool; MAX_HEIGHT],
    ) -> u64 {
        let Some(step) = self.steps.get(depth) else {
            return self.verify(host, map, flips) as u64;
        };
        // host event reached through the link, and the forced flip if any
        let (target, forced) = match step.link {
            Link::Down { from, role, slot } => {
                let src = host.events()[map[from] as usize];
                let l = src.outputs[out_role(src.kind, role, flips[from])];
                let Some((he, hs)) = host.lineages()[l as usize].consumer else {
                    return 0;
                };
                let forced = match step.kind {
                    EventKind::Branch => None,
                    EventKind::Retic => Some(slot != hs),
                };
                (he, forced)
            }
            Link::Up { from, slot, role } => {
                let src = host.events()[map[from] as usize];
                let s = match src.kind {
                    EventKind::Branch => 0,
                    EventKind::Retic => (slot ^ flips[from] as u8) as usize,
                };
                let l = src.inputs[s];
                let Some((he, hr)) = host.lineages()[l as usize].producer else {
                    return 0;
                };
                let forced = match (step.kind, role) {
                    (EventKind::Retic, 2) if hr != 2 => return 0,
                    (EventKind::Retic, 2) => None,
                    (EventKind::Retic, _) if hr == 2 => return 0,
                    _ => Some(role != hr),
                };
                (he, forced)
            }
        };
        if host.events()[target as usize].kind != step.kind {
            return 0;
        }
        map[step.event] = target;
        let mut total = 0;
        for flip in [false, true] {
            if forced.is_some_and(|f| f != flip) {
                continue;
            }
            flips[step.event] = flip;
            total += self.extend(host, depth + 1, map, flips);
        }
        total
    }

    /// Full check of a complete assignment.
    fn verify<H: Host + ?Sized>(
        &self,
        host: &H,
        map: &[u32; MAX_HEIGHT],
        flips: &[bool; MAX_HEIGHT],
    ) -> bool {
        let h = self.shape.height();
        for a in 0..h {
            if map[..a].contains(&map[a]) {
                return false;
            }
        }
        let hev = host.events();
        let hlin = host.lineages();
        for lin in &self.shape.lineages {
            let image = match (lin.producer, lin.consumer) {
                (Some((e, r)), _) => {
                    let ev = hev[map[e as usize] as usize];
                    ev.outputs[out_role(ev.kind, r, flips[e as usize])]
                }
                (None, Some((e, s))) => {
                    let ev = hev[map[e as usize] as usize];
                    match ev.kind {
                        EventKind::Branch => ev.inputs[0],
                        EventKind::Retic => ev.inputs[(s ^ flips[e as usize] as u8) as usize],
                    }
                }
                (None, None) => unreachable!("bare lineage in a pattern of positive height"),
            };
            let node = hlin[image as usize];
            match lin.consumer {
                None if node.consumer.is_some() => return false,
                None => {}
                Some((e, s)) => {
                    let he = map[e as usize];
                    let hs = match self.shape.events[e as usize].kind {
                        EventKind::Branch => 0,
                        EventKind::Retic => s ^ flips[e as usize] as u8,
                    };
                    if node.consumer != Some((he, hs)) {
                        return false;
                    }
                }
            }
            if let Some((e, r)) = lin.producer {
                let he = map[e as usize];
                let hr = out_role(self.shape.events[e as usize].kind, r, flips[e as usize]) as u8;
                if node.producer != Some((he, hr)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Number of occurrences of `p` on the fringe of `host`.
pub fn count_occurrences<H: Host + ?Sized>(host: &H, p: &PatternSpec) -> Result<u64, PatternError> {
    Ok(Matcher::new(p)?.count(host))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Event, Network};
    use alloc::vec;

    fn spec(k: usize, events: Vec<Event>) -> PatternSpec {
        PatternSpec::new(k, events).unwrap()
    }

    #[test]
    fn two_leaf_network_has_one_cherry() {
        let cherry = spec(1, vec![Event::Branch(0)]);
        assert_eq!(count_occurrences(&Network::initial(), &cherry).unwrap(), 1);
    }

    #[test]
    fn single_reticulation_is_a_trident() {
        let net = Network::initial().forward_step(0, 1).unwrap();
        let trident = spec(2, vec![Event::Retic(0, 1)]);
        let cherry = spec(1, vec![Event::Branch(0)]);
        assert_eq!(count_occurrences(&net, &trident).unwrap(), 1);
        assert_eq!(count_occurrences(&net, &cherry).unwrap(), 0);
    }

    #[test]
    fn pattern_occurs_once_in_itself() {
        let p = spec(
            4,
            vec![Event::Retic(0, 1), Event::Retic(2, 3), Event::Retic(0, 2)],
        );
        let m = Matcher::new(&p).unwrap();
        assert_eq!(m.count(m.shape()), 1);
        // the last reticulation on its own is a trident
        assert_eq!(
            count_occurrences(m.shape(), &spec(2, vec![Event::Retic(0, 1)])).unwrap(),
            1
        );
    }

    #[test]
    fn trivial_counts_external_lineages() {
        let net = crate::network::generate(17, 3).unwrap();
        assert_eq!(
            count_occurrences(&net, &PatternSpec::trivial()).unwrap(),
            17
        );
    }
}
