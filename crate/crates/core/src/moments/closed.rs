use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::recurrence::FirstOrderRecurrence;
use super::MomentError;
use crate::chains::{trident_table, ExactChain, MomentKind};
use crate::Rational;

/// Statistics with a known closed-form mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeanId {
    Trident,
    /// The normal height-2 pattern `c-i`.
    CI,
    /// The height-3 pattern made of two overlapping `c-i`.
    H3CI,
}

impl MeanId {
    pub const ALL: [MeanId; 3] = [MeanId::Trident, MeanId::CI, MeanId::H3CI];

    pub fn name(self) -> &'static str {
        match self {
            MeanId::Trident => "trident",
            MeanId::CI => "c-i",
            MeanId::H3CI => "h3-ci",
        }
    }

    /// Smallest `n` at which the closed form holds.
    pub fn min_n(self) -> u64 {
        match self {
            MeanId::Trident => 4,
            MeanId::CI => 6,
            MeanId::H3CI => 7,
        }
    }

    /// `κ` of the mean recurrence.
    pub fn kappa(self) -> u64 {
        match self {
            MeanId::Trident => 3,
            MeanId::CI => 5,
            MeanId::H3CI => 7,
        }
    }
}

impl core::str::FromStr for MeanId {
    type Err = MomentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeanId::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| MomentError::UnknownStatistic(s.into()))
    }
}

// Numerator coefficients from the constant term up, overall factor, leading
// denominator constant and the number of (n - i) factors.
struct Form {
    coeffs: &'static [i64],
    factor: i64,
    denominator: i64,
    falling: u64,
}

const TRIDENT: Form = Form {
    coeffs: &[0, -71, 144, -85, 15],
    factor: 1,
    denominator: 105,
    falling: 3,
};
const CI: Form = Form {
    coeffs: &[0, -135654, 319471, -261735, 96992, -16668, 1080],
    factor: 1,
    denominator: 20790,
    falling: 5,
};
const H3CI_PRINTED: Form = Form {
    coeffs: &[
        0, -24510098, -66128140, 0, 33968326, -9550275, 1509970, -125730, 4290,
    ],
    factor: 2,
    denominator: 1576575,
    falling: 7,
};
const H3CI_CORRECTED: Form = Form {
    coeffs: &[
        0, -24510098, 66128140, -66905671, 33968326, -9550275, 1509970, -125730, 4290,
    ],
    factor: 2,
    denominator: 1576575,
    falling: 7,
};

impl Form {
    fn eval(&self, n: u64) -> Result<Rational, MomentError> {
        let x = BigInt::from(n);
        let num = self
            .coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &c| acc * &x + c)
            * self.factor;
        let den = (1..=self.falling).fold(BigInt::from(self.denominator), |acc, i| acc * (&x - i));
        if den.is_zero() {
            return Err(MomentError::Singular { n });
        }
        Ok(Rational::new(num, den))
    }
}

/// The published closed form of the mean, evaluated exactly.
///
/// The `h3-ci` form has no `n²` term and disagrees with its recurrence; see
/// [`h3ci_mean_corrected`]. It also has a pole at its lower bound `n = 7`.
pub fn mean_closed_form(id: MeanId, n: u64) -> Result<Rational, MomentError> {
    if n < id.min_n() {
        return Err(MomentError::BelowRange { n, min: id.min_n() });
    }
    match id {
        MeanId::Trident => TRIDENT.eval(n),
        MeanId::CI => CI.eval(n),
        MeanId::H3CI => H3CI_PRINTED.eval(n),
    }
}

/// The `h3-ci` mean with the `n²` term restored as `−66905671·n²` and the
/// linear term as `+66128140·n`; exact for `n ≥ 8`.
pub fn h3ci_mean_corrected(n: u64) -> Result<Rational, MomentError> {
    if n < 8 {
        return Err(MomentError::BelowRange { n, min: 8 });
    }
    H3CI_CORRECTED.eval(n)
}

/// First two raw moments of the trident count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TridentMoments {
    pub n: u64,
    pub mean: Rational,
    pub second: Rational,
}

impl TridentMoments {
    pub fn variance(&self) -> Rational {
        &self.second - &self.mean * &self.mean
    }
}

/// Exact trident moments for `2 ≤ n ≤ n_max`, from the chain's law.
pub fn trident_moments(n_max: u64) -> Result<Vec<TridentMoments>, MomentError> {
    if n_max < 2 {
        return Err(MomentError::BelowRange { n: n_max, min: 2 });
    }
    let table = trident_table();
    let mut chain = ExactChain::new(&table, usize::MAX)?;
    let mut out = Vec::new();
    loop {
        let d = chain.distribution();
        out.push(TridentMoments {
            n: d.n,
            mean: d.moment(&[1], 1, MomentKind::Raw),
            second: d.moment(&[1], 2, MomentKind::Raw),
        });
        if d.n >= n_max {
            return Ok(out);
        }
        chain.advance()?;
    }
}

/// Means for `2 ≤ n ≤ n_max` by their recurrences, all started from zero at
/// two leaves. The `c-i` and `h3-ci` tolls use the exact trident moments.
pub fn mean_by_recurrence(id: MeanId, n_max: u64) -> Result<Vec<Rational>, MomentError> {
    let q = |a: i64, b: u64| Rational::new(a.into(), b.into());
    let moments = match id {
        MeanId::Trident => Vec::new(),
        _ => trident_moments(n_max)?,
    };
    let at = |n: u64| &moments[(n - 2) as usize];
    let toll = |n: u64| -> Rational {
        match id {
            MeanId::Trident => Rational::one() - q(1, n),
            MeanId::CI => (q(4, n) - q(12, n * n)) * &at(n).mean,
            MeanId::H3CI => q(4, n * n) * (&at(n).second - &at(n).mean),
        }
    };
    FirstOrderRecurrence::new(id.kappa(), toll, 2, Rational::zero())?.sequence(n_max)
}

/// `Var(T_{n+1}) − (1 − 6/n)² Var(T_n)` for `2 ≤ n < n_max`, tending to `24/49`.
pub fn trident_variance_increments(n_max: u64) -> Result<Vec<(u64, Rational)>, MomentError> {
    let m = trident_moments(n_max)?;
    Ok(m.windows(2)
        .map(|w| {
            let n = w[0].n;
            let f = Rational::new(BigInt::from(n as i64 - 6), BigInt::from(n));
            (n, w[1].variance() - &f * &f * w[0].variance())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn trident_spot_values() {
        assert_eq!(mean_closed_form(MeanId::Trident, 4).unwrap(), q(2, 3));
        assert!(matches!(
            mean_closed_form(MeanId::Trident, 3),
            Err(MomentError::BelowRange { .. })
        ));
        assert!(matches!(
            mean_closed_form(MeanId::H3CI, 7),
            Err(MomentError::Singular { n: 7 })
        ));
    }

    #[test]
    fn linear_growth_constants() {
        let n = 1_000_000u64;
        let ratio = |id| mean_closed_form(id, n).unwrap() / Rational::from_integer(n.into());
        assert!((ratio(MeanId::Trident) - q(1, 7)).abs() < q(1, 10_000));
        assert!((ratio(MeanId::CI) - q(4, 77)).abs() < q(1, 10_000));
    }

    #[test]
    fn moments_agree_with_recurrences() {
        let mu = mean_by_recurrence(MeanId::Trident, 60).unwrap();
        let rho = mean_by_recurrence(MeanId::CI, 60).unwrap();
        let tau = mean_by_recurrence(MeanId::H3CI, 60).unwrap();
        let tm = trident_moments(60).unwrap();
        for n in 4..=60u64 {
            let i = (n - 2) as usize;
            assert_eq!(tm[i].mean, mu[i]);
            assert_eq!(
                mean_closed_form(MeanId::Trident, n).unwrap(),
                mu[i],
                "n = {n}"
            );
            if n >= 6 {
                assert_eq!(mean_closed_form(MeanId::CI, n).unwrap(), rho[i], "n = {n}");
            }
            if n >= 8 {
                assert_eq!(h3ci_mean_corrected(n).unwrap(), tau[i], "n = {n}");
                assert_ne!(
                    mean_closed_form(MeanId::H3CI, n).unwrap(),
                    tau[i],
                    "n = {n}"
                );
            }
        }
        assert_eq!(tau[5], q(19, 1350));
        assert_eq!(tau[6], q(278, 11025));
    }

    #[test]
    fn names_round_trip() {
        for id in MeanId::ALL {
            assert_eq!(id.name().parse::<MeanId>().unwrap(), id);
        }
        assert!("x".parse::<MeanId>().is_err());
    }
}
