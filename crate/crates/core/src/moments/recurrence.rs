use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::MomentError;
use crate::Rational;

/// `φ_{n+1} = (1 − κ/n)² φ_n + ψ_n`, started at `φ_{initial_index} = initial_value`.
#[derive(Debug, Clone)]
pub struct FirstOrderRecurrence<F> {
    pub kappa: u64,
    pub toll: F,
    pub initial_index: u64,
    pub initial_value: Rational,
}

impl<F: Fn(u64) -> Rational> FirstOrderRecurrence<F> {
    pub fn new(
        kappa: u64,
        toll: F,
        initial_index: u64,
        initial_value: Rational,
    ) -> Result<Self, MomentError> {
        if kappa == 0 || initial_index == 0 {
            return Err(MomentError::BadRecurrence);
        }
        Ok(Self {
            kappa,
            toll,
            initial_index,
            initial_value,
        })
    }

    fn step(&self, n: u64, phi: &Rational) -> Rational {
        let f = Rational::new(
            BigInt::from(n as i128 - self.kappa as i128),
            BigInt::from(n),
        );
        &f * &f * phi + (self.toll)(n)
    }

    fn check(&self, n: u64) -> Result<(), MomentError> {
        if n < self.initial_index {
            Err(MomentError::BelowRange {
                n,
                min: self.initial_index,
            })
        } else {
            Ok(())
        }
    }

    /// Step-by-step iteration.
    pub fn solve_direct(&self, n: u64) -> Result<Rational, MomentError> {
        self.check(n)?;
        let mut phi = self.initial_value.clone();
        for m in self.initial_index..n {
            phi = self.step(m, &phi);
        }
        Ok(phi)
    }

    /// Summation form `φ_n = C(n−1,κ)⁻² (C(s−1,κ)² φ_s + Σ_{s≤ℓ<n} C(ℓ,κ)² ψ_ℓ)`
    /// with `s = max(initial_index, κ+1)`; below `κ+1` the binomials vanish,
    /// so those first steps are taken directly.
    pub fn solve_closed(&self, n: u64) -> Result<Rational, MomentError> {
        self.check(n)?;
        let start = self.initial_index.max(self.kappa + 1);
        if n <= start {
            return self.solve_direct(n);
        }
        let phi_start = self.solve_direct(start)?;
        let c0 = binomial(start - 1, self.kappa);
        let mut g = Rational::from_integer(&c0 * &c0) * phi_start;
        for l in start..n {
            let c = binomial(l, self.kappa);
            g += Rational::from_integer(&c * &c) * (self.toll)(l);
        }
        let c = binomial(n - 1, self.kappa);
        Ok(g / Rational::from_integer(&c * &c))
    }

    /// `φ_m` for `initial_index ≤ m ≤ n`.
    pub fn sequence(&self, n: u64) -> Result<Vec<Rational>, MomentError> {
        self.check(n)?;
        let mut phi = self.initial_value.clone();
        let mut out = alloc::vec![phi.clone()];
        for m in self.initial_index..n {
            phi = self.step(m, &phi);
            out.push(phi.clone());
        }
        Ok(out)
    }
}

/// Exact solution of a recurrence, by the summation form.
pub fn solve_recurrence<F: Fn(u64) -> Rational>(
    r: &FirstOrderRecurrence<F>,
    n: u64,
) -> Result<Rational, MomentError> {
    r.solve_closed(n)
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn zero_recurrence_stays_zero() {
        let r = FirstOrderRecurrence::new(1, |_| Rational::zero(), 2, Rational::zero()).unwrap();
        for n in 2..40 {
            assert!(r.solve_direct(n).unwrap().is_zero());
            assert!(r.solve_closed(n).unwrap().is_zero());
        }
    }

    #[test]
    fn trident_mean_at_four() {
        let r = FirstOrderRecurrence::new(3, |n| q(1, 1) - q(1, n as i64), 2, Rational::zero())
            .unwrap();
        assert_eq!(r.solve_direct(3).unwrap(), q(1, 2));
        assert_eq!(r.solve_direct(4).unwrap(), q(2, 3));
        assert_eq!(solve_recurrence(&r, 4).unwrap(), q(2, 3));
        assert!(matches!(
            r.solve_closed(1),
            Err(MomentError::BelowRange { .. })
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(7, 7), BigInt::one());
    }
}
