use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::table::TransitionTable;
use super::ChainError;
use crate::Rational;

const FIELD_BITS: u32 = 20;
const FIELD_MASK: u64 = (1 << FIELD_BITS) - 1;
const MAX_TYPES: usize = 3;

/// Default cap on the number of live states.
pub const DEFAULT_STATE_BUDGET: usize = 200_000;

fn pack(counts: &[i64]) -> u64 {
    counts
        .iter()
        .rev()
        .fold(0u64, |acc, &c| (acc << FIELD_BITS) | c as u64)
}

fn unpack(key: u64, k: usize) -> Vec<i64> {
    (0..k)
        .map(|i| ((key >> (FIELD_BITS * i as u32)) & FIELD_MASK) as i64)
        .collect()
}

/// Exact law of the type counts at a fixed leaf count.
///
/// Weights are integers over the common denominator `((n-1)!)²`, the number
/// of construction histories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub n: u64,
    arity: usize,
    weights: BTreeMap<u64, BigUint>,
    denominator: BigUint,
}

/// Which moment [`ExactDistribution::moment`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    Raw,
    Central,
    /// `E[X(X-1)...(X-m+1)]`.
    Falling,
}

impl ExactDistribution {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// `(counts, probability)` pairs in increasing packed order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, Rational)> + '_ {
        let den = BigInt::from(self.denominator.clone());
        self.weights.iter().map(move |(&k, w)| {
            (
                unpack(k, self.arity),
                Rational::new(BigInt::from(w.clone()), den.clone()),
            )
        })
    }

    /// The distribution as a map from count vectors to probabilities.
    pub fn to_map(&self) -> BTreeMap<Vec<i64>, Rational> {
        self.iter().collect()
    }

    pub fn total(&self) -> Rational {
        let sum: BigUint = self.weights.values().sum();
        Rational::new(sum.into(), self.denominator.clone().into())
    }

    /// Law of the linear statistic `Σ weights[i]·counts[i]`.
    pub fn statistic(&self, weights: &[i64]) -> BTreeMap<i64, Rational> {
        let mut out: BTreeMap<i64, BigUint> = BTreeMap::new();
        for (&k, w) in &self.weights {
            let x: i64 = unpack(k, self.arity)
                .iter()
                .zip(weights)
                .map(|(c, w)| c * w)
                .sum();
            *out.entry(x).or_default() += w;
        }
        let den = BigInt::from(self.denominator.clone());
        out.into_iter()
            .map(|(x, w)| (x, Rational::new(w.into(), den.clone())))
            .collect()
    }

    /// Moment of order `power` of a linear statistic.
    pub fn moment(&self, weights: &[i64], power: u32, kind: MomentKind) -> Rational {
        let law = self.statistic(weights);
        let shift = match kind {
            MomentKind::Central => law
                .iter()
                .map(|(&x, p)| p * Rational::from_integer(x.into()))
                .sum(),
            _ => Rational::zero(),
        };
        law.iter()
            .map(|(&x, p)| {
                let x = Rational::from_integer(x.into());
                let term = match kind {
                    MomentKind::Falling => (0..power).fold(Rational::one(), |acc, i| {
                        acc * (&x - Rational::from_integer(i.into()))
                    }),
                    _ => num_traits::pow(&x - &shift, power as usize),
                };
                p * term
            })
            .sum()
    }
}

/// Forward propagation of a chain's exact law, one leaf at a time.
#[derive(Debug, Clone)]
pub struct ExactChain<'a> {
    table: &'a TransitionTable,
    compiled: super::table::CompiledTable,
    dist: ExactDistribution,
    budget: usize,
}

impl<'a> ExactChain<'a> {
    /// Starts at the two-leaf state.
    pub fn new(table: &'a TransitionTable, budget: usize) -> Result<Self, ChainError> {
        let k = table.arity();
        if k > MAX_TYPES {
            return Err(ChainError::Malformed(alloc::format!(
                "{k} types exceed the packed state range"
            )));
        }
        let mut weights = BTreeMap::new();
        weights.insert(pack(&table.initial_counts()), BigUint::one());
        Ok(Self {
            table,
            compiled: table.compile(),
            dist: ExactDistribution {
                n: 2,
                arity: k,
                weights,
                denominator: BigUint::one(),
            },
            budget,
        })
    }

    pub fn distribution(&self) -> &ExactDistribution {
        &self.dist
    }

    pub fn into_distribution(self) -> ExactDistribution {
        self.dist
    }

    /// Moves from `n` to `n + 1` leaves.
    pub fn advance(&mut self) -> Result<(), ChainError> {
        let table = self.table;
        let n = self.dist.n;
        if n + 1 >= 1 << FIELD_BITS {
            return Err(ChainError::Malformed(alloc::format!(
                "n = {} is beyond the packed state range",
                n + 1
            )));
        }
        let k = self.dist.arity;
        let mut values = alloc::vec![0i64; k + 1];
        values[0] = n as i64;
        let mut next: BTreeMap<u64, BigUint> = BTreeMap::new();
        for (&key, w) in &self.dist.weights {
            let counts = unpack(key, k);
            values[1..].copy_from_slice(&counts);
            let mut total = 0i64;
            for (num, delta, idx) in &self.compiled.rules {
                let v = num.eval(&values);
                if v < 0 {
                    return Err(ChainError::NegativeRate {
                        label: table.rules[*idx].label.clone(),
                        n,
                        counts,
                    });
                }
                total += v;
                if v == 0 {
                    continue;
                }
                let to: Vec<i64> = counts.iter().zip(delta).map(|(c, d)| c + d).collect();
                if !table.is_feasible(n as i64 + 1, &to) {
                    return Err(ChainError::Infeasible {
                        label: table.rules[*idx].label.clone(),
                        n: n + 1,
                        counts: to,
                    });
                }
                *next.entry(pack(&to)).or_default() += w * (v as u64);
            }
            if total != (n * n) as i64 {
                return Err(ChainError::MassDeficit { n, counts, total });
            }
        }
        if next.len() > self.budget {
            return Err(ChainError::Budget {
                states: next.len(),
                budget: self.budget,
            });
        }
        self.dist.weights = next;
        self.dist.denominator *= n * n;
        self.dist.n = n + 1;
        Ok(())
    }
}

/// Exact distribution of the chain at `n_target` leaves.
pub fn exact_distribution(
    table: &TransitionTable,
    n_target: u64,
    budget: usize,
) -> Result<ExactDistribution, ChainError> {
    if n_target < 2 {
        return Err(ChainError::TooFewLeaves(n_target));
    }
    let mut chain = ExactChain::new(table, budget)?;
    while chain.distribution().n < n_target {
        chain.advance()?;
    }
    Ok(chain.into_distribution())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::trident_table;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn trident_small_n() {
        let t = trident_table();
        let d3 = exact_distribution(&t, 3, 100).unwrap().to_map();
        assert_eq!(
            d3,
            [(alloc::vec![0], q(1, 2)), (alloc::vec![1], q(1, 2))]
                .into_iter()
                .collect()
        );
        let d4 = exact_distribution(&t, 4, 100).unwrap();
        assert_eq!(
            d4.to_map(),
            [(alloc::vec![0], q(1, 3)), (alloc::vec![1], q(2, 3))]
                .into_iter()
                .collect()
        );
        assert_eq!(d4.moment(&[1], 1, MomentKind::Raw), q(2, 3));
        assert_eq!(d4.moment(&[1], 0, MomentKind::Raw), q(1, 1));
        assert_eq!(d4.moment(&[1], 2, MomentKind::Central), q(2, 9));
        assert_eq!(d4.moment(&[1], 2, MomentKind::Falling), q(0, 1));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let t = trident_table();
        for n in 2..=25 {
            assert!(exact_distribution(&t, n, 1000).unwrap().total().is_one());
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            exact_distribution(&trident_table(), 40, 3),
            Err(ChainError::Budget { .. })
        ));
    }

    #[test]
    fn packing_round_trips() {
        for c in [[0i64, 0, 0], [5, 0, 17], [1000, 2000, 3]] {
            assert_eq!(unpack(pack(&c), 3), c.to_vec());
        }
    }
}
