use alloc::vec::Vec;

use super::table::{CompiledTable, TransitionTable};
use super::ChainError;
use crate::chains::poly::MAX_VARS;
use crate::rng::{self, RngCore};

/// Leaf count and tracked type counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainState {
    pub n: u64,
    pub counts: Vec<i64>,
}

/// Draws chain trajectories for one table.
#[derive(Debug, Clone)]
pub struct Sampler {
    compiled: CompiledTable,
    initial: Vec<i64>,
    labels: Vec<alloc::string::String>,
}

impl Sampler {
    pub fn new(table: &TransitionTable) -> Self {
        Self {
            compiled: table.compile(),
            initial: table.initial_counts(),
            labels: table.rules.iter().map(|r| r.label.clone()).collect(),
        }
    }

    pub fn initial(&self) -> ChainState {
        ChainState {
            n: 2,
            counts: self.initial.clone(),
        }
    }

    /// Advances `state` by one event.
    pub fn step<R: RngCore + ?Sized>(
        &self,
        state: &mut ChainState,
        rng: &mut R,
    ) -> Result<(), ChainError> {
        let n = state.n;
        let k = state.counts.len();
        let mut values = [0i64; MAX_VARS];
        values[0] = n as i64;
        values[1..=k].copy_from_slice(&state.counts);
        let u = rng::below(rng, n * n) as i64;
        let mut acc = 0i64;
        for (num, delta, idx) in &self.compiled.rules {
            acc += num.eval(&values[..=k]);
            if u < acc {
                for (c, d) in state.counts.iter_mut().zip(delta) {
                    *c += d;
                }
                state.n += 1;
                let occupied: i64 = self
                    .compiled
                    .footprints
                    .iter()
                    .zip(&state.counts)
                    .map(|(f, c)| f * c)
                    .sum();
                if state.counts.iter().any(|&c| c < 0) || occupied > state.n as i64 {
                    return Err(ChainError::Infeasible {
                        label: self.labels[*idx].clone(),
                        n: state.n,
                        counts: state.counts.clone(),
                    });
                }
                return Ok(());
            }
        }
        Err(ChainError::MassDeficit {
            n,
            counts: state.counts.clone(),
            total: acc,
        })
    }

    /// Runs from the two-leaf state up to `n_target` leaves.
    pub fn run<R: RngCore + ?Sized>(
        &self,
        n_target: u64,
        rng: &mut R,
    ) -> Result<ChainState, ChainError> {
        if n_target < 2 {
            return Err(ChainError::TooFewLeaves(n_target));
        }
        let mut state = self.initial();
        while state.n < n_target {
            self.step(&mut state, rng)?;
        }
        Ok(state)
    }

    /// Every state from `n = 2` to `n_target`.
    pub fn trajectory<R: RngCore + ?Sized>(
        &self,
        n_target: u64,
        rng: &mut R,
    ) -> Result<Vec<ChainState>, ChainError> {
        if n_target < 2 {
            return Err(ChainError::TooFewLeaves(n_target));
        }
        let mut state = self.initial();
        let mut out = alloc::vec![state.clone()];
        while state.n < n_target {
            self.step(&mut state, rng)?;
            out.push(state.clone());
        }
        Ok(out)
    }
}

/// Final state of one trajectory driven by stream 0 of `seed`.
pub fn simulate(
    table: &TransitionTable,
    n_target: u64,
    seed: u64,
) -> Result<ChainState, ChainError> {
    Sampler::new(table).run(n_target, &mut rng::stream(seed, 0))
}
