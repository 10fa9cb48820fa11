use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use super::build::Network;
use super::{Event, EventLog, NetError};
use crate::Rational;

/// Largest leaf count accepted by [`enumerate_histories`].
pub const MAX_ENUMERATION_LEAVES: usize = 9;

/// Number of construction histories with `n` leaves: `∏_{ℓ=2}^{n-1} ℓ²`.
pub fn history_count(n: usize) -> u128 {
    (2..n as u128).map(|l| l * l).product()
}

/// Every construction history with `n` leaves, each with its exact probability.
pub fn enumerate_histories(n: usize) -> Result<Histories, NetError> {
    if n < 2 {
        return Err(NetError::TooFewLeaves(n));
    }
    if n > MAX_ENUMERATION_LEAVES {
        return Err(NetError::EnumerationTooLarge {
            n,
            max: MAX_ENUMERATION_LEAVES,
        });
    }
    let total = BigInt::from(history_count(n));
    Ok(Histories {
        digits: alloc::vec![0; n - 2],
        probability: Rational::new(BigInt::one(), total),
        done: false,
    })
}

/// Odometer over the ordered pair drawn at each step.
#[derive(Debug, Clone)]
pub struct Histories {
    digits: Vec<usize>,
    probability: Rational,
    done: bool,
}

impl Iterator for Histories {
    type Item = (Network, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let events = self
            .digits
            .iter()
            .enumerate()
            .map(|(step, &d)| {
                let l = step + 2;
                Event::from_pair(d / l, d % l)
            })
            .collect();
        let log = EventLog { events };
        let net = Network::from_log(&log);

        // advance, last step fastest
        self.done = true;
        for step in (0..self.digits.len()).rev() {
            let l = step + 2;
            self.digits[step] += 1;
            if self.digits[step] < l * l {
                self.done = false;
                break;
            }
            self.digits[step] = 0;
        }
        Some((net, self.probability.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn three_leaves() {
        let all: Vec<_> = enumerate_histories(3).unwrap().collect();
        assert_eq!(all.len(), 4);
        let quarter = Rational::new(1.into(), 4.into());
        assert!(all.iter().all(|(_, p)| *p == quarter));
    }

    #[test]
    fn four_leaves_sum_to_one() {
        let mut sum = Rational::zero();
        let mut count = 0;
        for (net, p) in enumerate_histories(4).unwrap() {
            assert!(net.validate().is_valid());
            sum += p;
            count += 1;
        }
        assert_eq!(count, 36);
        assert!(sum.is_one());
    }

    #[test]
    fn histories_are_distinct() {
        let logs: alloc::collections::BTreeSet<_> = enumerate_histories(5)
            .unwrap()
            .map(|(net, _)| net.log().events().to_vec())
            .collect();
        assert_eq!(logs.len() as u128, history_count(5));
    }

    #[test]
    fn guard() {
        assert!(enumerate_histories(10).is_err());
        assert!(enumerate_histories(1).is_err());
        assert_eq!(enumerate_histories(2).unwrap().count(), 1);
    }
}
