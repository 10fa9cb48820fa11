use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::MomentError;
use crate::Rational;

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

/// `E N^m` for a standard normal `N`: `(m−1)!!` for even `m`, else 0.
pub fn gaussian_moment(m: u32) -> Rational {
    if m % 2 == 1 {
        return Rational::zero();
    }
    let dfact = (1..m).step_by(2).fold(BigInt::one(), |acc, k| acc * k);
    Rational::from_integer(dfact)
}

/// Leading behaviour `(coefficient, exponent)` of the `m`-th central moment of
/// the trident count: `g_m (24/637)^{m/2} n^{m/2}`.
pub fn higher_central_moment_target(m: u32) -> (Rational, Rational) {
    let var = q(24, 637);
    let coefficient = if m.is_multiple_of(2) {
        gaussian_moment(m) * num_traits::pow(var, (m / 2) as usize)
    } else {
        Rational::zero()
    };
    (coefficient, q(m as i64, 2))
}

/// `φ_n ∼ c/(2κ+α+1) · n^{α+1}` whenever `ψ_n ∼ c n^α`.
pub fn asymptotic_transfer(
    kappa: u64,
    c: &Rational,
    alpha: &Rational,
) -> Result<(Rational, Rational), MomentError> {
    let denom = Rational::from_integer(BigInt::from(2 * kappa + 1)) + alpha;
    if !denom.is_positive() {
        return Err(MomentError::TransferThreshold);
    }
    Ok((c / denom, alpha + Rational::one()))
}

/// Symmetric 3×3 covariance matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovarianceMatrix {
    entries: [[Rational; 3]; 3],
}

impl CovarianceMatrix {
    pub fn new(entries: [[Rational; 3]; 3]) -> Result<Self, MomentError> {
        let positive = (0..3).all(|i| entries[i][i].is_positive());
        let symmetric = (0..3).all(|i| (0..i).all(|j| entries[i][j] == entries[j][i]));
        if !positive || !symmetric {
            return Err(MomentError::NotCovariance);
        }
        Ok(Self { entries })
    }

    /// Limit covariance per leaf of the `(h3-ci, c-i, trident)` counts.
    pub fn limit() -> Self {
        let a = q(1002796, 203664825);
        let ab = q(433528, 62537475);
        let ac = q(-32, 13377);
        let b = q(4575916, 137582445);
        let bc = q(-608, 119119);
        let c = q(24, 637);
        Self::new([
            [a, ab.clone(), ac.clone()],
            [ab, b, bc.clone()],
            [ac, bc, c],
        ])
        .expect("positive diagonal")
    }

    /// Entry with zero-based indices.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[[Rational; 3]; 3] {
        &self.entries
    }
}

/// Memoized mixed moments `c_{r,s,t} = E N₁^r N₂^s N₃^t` of a centered
/// Gaussian vector.
#[derive(Debug, Clone)]
pub struct Isserlis {
    sigma: CovarianceMatrix,
    memo: BTreeMap<(i64, i64, i64), Rational>,
}

impl Isserlis {
    pub fn new(sigma: CovarianceMatrix) -> Self {
        Self {
            sigma,
            memo: BTreeMap::new(),
        }
    }

    pub fn sigma(&self) -> &CovarianceMatrix {
        &self.sigma
    }

    /// Zero for negative indices or odd total order.
    pub fn moment(&mut self, r: i64, s: i64, t: i64) -> Rational {
        if r < 0 || s < 0 || t < 0 || (r + s + t) % 2 == 1 {
            return Rational::zero();
        }
        if r + s + t == 0 {
            return Rational::one();
        }
        if let Some(v) = self.memo.get(&(r, s, t)) {
            return v.clone();
        }
        let k = |x: i64| Rational::from_integer(x.into());
        let sg = |i: usize, j: usize, this: &Self| this.sigma.entries[i][j].clone();
        // pair off one copy of the first variable present
        let v = if r > 0 {
            k(r - 1) * sg(0, 0, self) * self.moment(r - 2, s, t)
                + k(s) * sg(0, 1, self) * self.moment(r - 1, s - 1, t)
                + k(t) * sg(0, 2, self) * self.moment(r - 1, s, t - 1)
        } else if s > 0 {
            k(s - 1) * sg(1, 1, self) * self.moment(r, s - 2, t)
                + k(t) * sg(1, 2, self) * self.moment(r, s - 1, t - 1)
        } else {
            k(t - 1) * sg(2, 2, self) * self.moment(r, s, t - 2)
        };
        self.memo.insert((r, s, t), v.clone());
        v
    }

    /// Right-hand side of the pairing recurrence that expands variable `axis`.
    pub fn pairing_expansion(&mut self, axis: usize, r: i64, s: i64, t: i64) -> Rational {
        let idx = [r, s, t];
        let mut total = Rational::zero();
        for j in 0..3 {
            let mult = if j == axis { idx[j] - 1 } else { idx[j] };
            if mult <= 0 {
                continue;
            }
            let mut lower = idx;
            lower[axis] -= 1;
            lower[j] -= 1;
            total += Rational::from_integer(mult.into())
                * self.sigma.entries[axis][j].clone()
                * self.moment(lower[0], lower[1], lower[2]);
        }
        total
    }

    /// First `(r, s, t, axis)` with `r+s+t ≤ max_order` where a pairing
    /// recurrence fails, if any.
    pub fn check_pairing_recurrences(&mut self, max_order: i64) -> Option<(i64, i64, i64, usize)> {
        for (r, s, t) in triples(max_order) {
            let c = self.moment(r, s, t);
            let idx = [r, s, t];
            for (axis, &k) in idx.iter().enumerate() {
                if k > 0 && self.pairing_expansion(axis, r, s, t) != c {
                    return Some((r, s, t, axis));
                }
            }
        }
        None
    }
}

/// All `(r, s, t)` with nonnegative entries and `1 ≤ r+s+t ≤ max_order`.
pub fn triples(max_order: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for total in 1..=max_order {
        for r in 0..=total {
            for s in 0..=total - r {
                out.push((r, s, total - r - s));
            }
        }
    }
    out
}

/// Mixed moment of the centered Gaussian with covariance `sigma`.
pub fn isserlis(sigma: &CovarianceMatrix, r: u32, s: u32, t: u32) -> Rational {
    Isserlis::new(sigma.clone()).moment(r as i64, s as i64, t as i64)
}

/// Both sides of the weighted identity for one `(r, s, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofIdentity {
    pub r: i64,
    pub s: i64,
    pub t: i64,
    /// The toll coefficient built from lower-order moments.
    pub tilde_c: Rational,
    /// The same after substituting the pairing expansions of the two shifted terms.
    pub reduced: Rational,
    /// `(29r/2 + 21s/2 + 13t/2) c_{r,s,t}`.
    pub weighted: Rational,
}

impl ProofIdentity {
    pub fn holds(&self) -> bool {
        self.tilde_c == self.weighted && self.reduced == self.weighted
    }
}

/// Evaluates the toll coefficient for the `(h3-ci, c-i, trident)` moment of
/// order `(r, s, t)` in two ways and compares it with the weighted moment.
pub fn check_proof_identity(iss: &mut Isserlis, r: i64, s: i64, t: i64) -> ProofIdentity {
    let k = |x: i64| Rational::from_integer(x.into());
    let c2 = |x: i64| k(x * (x - 1) / 2);
    let mut c = |a, b, d| iss.moment(a, b, d);
    let tilde_c = k(4 * s) * c(r, s - 1, t + 1)
        + k(r) * q(8, 7) * c(r - 1, s, t + 1)
        + c2(r) * q(80092, 540225) * c(r - 2, s, t)
        + c2(s) * q(21916, 29645) * c(r, s - 2, t)
        + c2(t) * q(24, 49) * c(r, s, t - 2)
        - k(s * t) * q(128, 539) * c(r, s - 1, t - 1)
        - k(r * t) * q(32, 343) * c(r - 1, s, t - 1)
        + k(r * s) * q(712, 3773) * c(r - 1, s - 1, t);
    let reduced = c2(r) * q(1002796, 7022925) * c(r - 2, s, t)
        + c2(s) * q(4575916, 6551545) * c(r, s - 2, t)
        + c2(t) * q(24, 49) * c(r, s, t - 2)
        - k(s * t) * q(608, 7007) * c(r, s - 1, t - 1)
        - k(r * t) * q(32, 637) * c(r - 1, s, t - 1)
        + k(r * s) * q(433528, 2501499) * c(r - 1, s - 1, t);
    let weighted = (k(29 * r) / k(2) + k(21 * s) / k(2) + k(13 * t) / k(2)) * c(r, s, t);
    ProofIdentity {
        r,
        s,
        t,
        tilde_c,
        reduced,
        weighted,
    }
}
