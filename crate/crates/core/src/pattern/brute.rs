use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{Host, PatternError, PatternSpec, Shape};
use crate::network::EventKind;

pub const BRUTE_MAX_HEIGHT: usize = 4;
pub const BRUTE_MAX_EVENTS: usize = 120;

/// Image of pattern lineage `(event, role)` under the host event `he` with swap flag.
fn host_output<H: Host + ?Sized>(host: &H, he: u32, flip: bool, role: u8) -> u32 {
    let ev = host.events()[he as usize];
    let r = if role == 2 {
        2
    } else {
        (role as usize) ^ (flip as usize)
    };
    ev.outputs[r]
}

fn host_input<H: Host + ?Sized>(host: &H, he: u32, flip: bool, slot: u8) -> u32 {
    let ev = host.events()[he as usize];
    match ev.kind {
        EventKind::Branch => ev.inputs[0],
        EventKind::Retic => ev.inputs[(slot as usize) ^ (flip as usize)],
    }
}

struct Search<'a, H: Host + ?Sized> {
    shape: &'a Shape,
    host: &'a H,
    map: Vec<u32>,
    flips: Vec<bool>,
    found: BTreeSet<Vec<u32>>,
}

impl<H: Host + ?Sized> Search<'_, H> {
    /// Checks every lineage of pattern event `e` whose other end is already
    /// mapped, and that final outputs land on external lineages.
    fn consistent(&self, e: usize) -> bool {
        let ev = self.shape.events[e];
        let (he, flip) = (self.map[e], self.flips[e]);
        for role in 0..ev.kind.outputs() as u8 {
            let hl = host_output(self.host, he, flip, role);
            match self.shape.lineages[ev.outputs[role as usize] as usize].consumer {
                None => {
                    if !self.host.is_external(hl) {
                        return false;
                    }
                }
                Some((c, slot)) if (c as usize) < e => {
                    if host_input(
                        self.host,
                        self.map[c as usize],
                        self.flips[c as usize],
                        slot,
                    ) != hl
                    {
                        return false;
                    }
                }
                Some(_) => {}
            }
        }
        for slot in 0..ev.kind.inputs() as u8 {
            let hl = host_input(self.host, he, flip, slot);
            if let Some((p, role)) = self.shape.lineages[ev.inputs[slot as usize] as usize].producer
            {
                if (p as usize) < e
                    && host_output(
                        self.host,
                        self.map[p as usize],
                        self.flips[p as usize],
                        role,
                    ) != hl
                {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, e: usize) {
        if e == self.shape.events.len() {
            let mut set = self.map.clone();
            set.sort_unstable();
            self.found.insert(set);
            return;
        }
        let kind = self.shape.events[e].kind;
        for he in 0..self.host.events().len() as u32 {
            if self.host.events()[he as usize].kind != kind || self.map[..e].contains(&he) {
                continue;
            }
            self.map[e] = he;
            for flip in [false, true] {
                self.flips[e] = flip;
                if self.consistent(e) {
                    self.run(e + 1);
                }
            }
        }
    }
}

/// Occurrence count by exhaustive search over injective event maps.
///
/// Occurrences are told apart by the set of host events they use.
pub fn count_occurrences_bruteforce<H: Host + ?Sized>(
    host: &H,
    p: &PatternSpec,
) -> Result<u64, PatternError> {
    if p.height() > BRUTE_MAX_HEIGHT {
        return Err(PatternError::TooHigh {
            height: p.height(),
            max: BRUTE_MAX_HEIGHT,
        });
    }
    if host.events().len() > BRUTE_MAX_EVENTS {
        return Err(PatternError::HostTooLarge {
            events: host.events().len(),
            max: BRUTE_MAX_EVENTS,
        });
    }
    let shape = p.shape()?;
    if shape.events.is_empty() {
        return Ok(host
            .lineages()
            .iter()
            .filter(|l| l.consumer.is_none())
            .count() as u64);
    }
    let h = shape.events.len();
    let mut search = Search {
        shape: &shape,
        host,
        map: alloc::vec![0; h],
        flips: alloc::vec![false; h],
        found: BTreeSet::new(),
    };
    search.run(0);
    Ok(search.found.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{generate, Event, EventKind};
    use alloc::vec;

    #[test]
    fn cherries_are_branchings_with_two_leaf_children() {
        let cherry = PatternSpec::new(1, vec![Event::Branch(0)]).unwrap();
        for seed in 0..20 {
            let net = generate(25, seed).unwrap();
            let direct = net
                .events()
                .iter()
                .filter(|e| {
                    e.kind == EventKind::Branch
                        && net.is_external(e.outputs[0])
                        && net.is_external(e.outputs[1])
                })
                .count() as u64;
            assert_eq!(count_occurrences_bruteforce(&net, &cherry).unwrap(), direct);
        }
    }

    #[test]
    fn guards() {
        let tall = PatternSpec::new(1, vec![Event::Branch(0); 5]).unwrap();
        assert!(count_occurrences_bruteforce(&generate(5, 0).unwrap(), &tall).is_err());
        let cherry = PatternSpec::new(1, vec![Event::Branch(0)]).unwrap();
        assert!(count_occurrences_bruteforce(&generate(500, 0).unwrap(), &cherry).is_err());
    }
}
