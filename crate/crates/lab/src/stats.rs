//! Sample estimators and the chi-square distribution.

use serde::Serialize;

/// Regularized upper incomplete gamma function `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "gamma_q needs a > 0 and x ≥ 0");
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    }
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let s = C[1..]
        .iter()
        .enumerate()
        .fold(C[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + s.ln()
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..10_000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    // modified Lentz
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_sf(stat: f64, df: u32) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    gamma_q(df as f64 / 2.0, stat / 2.0).clamp(0.0, 1.0)
}

/// `P(|Z| > |z|)` for a standard normal `Z`.
pub fn normal_two_sided(z: f64) -> f64 {
    gamma_q(0.5, z * z / 2.0).clamp(0.0, 1.0)
}

pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    (-lambda + k as f64 * lambda.ln() - ln_gamma(k as f64 + 1.0)).exp()
}

/// Estimates for one statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatSummary {
    pub name: String,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// `central[k]` is the `k`-th central moment about the sample mean, `k ≤ 6`.
    pub central: [f64; 7],
    /// `falling[k] = mean of x(x−1)⋯(x−k+1)`, `k ≤ 4`.
    pub falling: [f64; 5],
    pub se_mean: f64,
    pub se_variance: f64,
    pub min: i64,
    pub max: i64,
    /// Exact power sums `Σ x^k`, `k ≤ 6`, kept for audit.
    pub power_sums: [i128; 7],
}

impl StatSummary {
    pub fn from_samples(name: &str, xs: &[i64]) -> Self {
        assert!(!xs.is_empty(), "no samples");
        let reps = xs.len() as f64;
        let mut power_sums = [0i128; 7];
        let mut falling = [0f64; 5];
        for &x in xs {
            let mut p = 1i128;
            for s in power_sums.iter_mut() {
                *s += p;
                p *= x as i128;
            }
            let mut f = 1f64;
            for (k, acc) in falling.iter_mut().enumerate() {
                *acc += f;
                f *= (x - k as i64) as f64;
            }
        }
        for f in falling.iter_mut() {
            *f /= reps;
        }
        let mean = power_sums[1] as f64 / reps;
        let mut central = [0f64; 7];
        for &x in xs {
            let d = x as f64 - mean;
            let mut p = 1.0;
            for c in central.iter_mut() {
                *c += p;
                p *= d;
            }
        }
        for c in central.iter_mut() {
            *c /= reps;
        }
        let variance = if xs.len() > 1 {
            central[2] * reps / (reps - 1.0)
        } else {
            0.0
        };
        Self {
            name: name.to_string(),
            mean,
            variance,
            central,
            falling,
            se_mean: (variance / reps).sqrt(),
            se_variance: ((central[4] - central[2] * central[2]).max(0.0) / reps).sqrt(),
            min: *xs.iter().min().expect("nonempty"),
            max: *xs.iter().max().expect("nonempty"),
            power_sums,
        }
    }

    /// Standardized third moment.
    pub fn skewness(&self) -> f64 {
        self.central[3] / self.central[2].powf(1.5)
    }

    /// Standardized fourth moment (3 for a normal law).
    pub fn kurtosis(&self) -> f64 {
        self.central[4] / (self.central[2] * self.central[2])
    }
}

/// Estimates for all statistics of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub replications: usize,
    pub statistics: Vec<StatSummary>,
    /// Unbiased pairwise covariances in statistic order.
    pub covariances: Vec<Vec<f64>>,
}

impl SampleSummary {
    /// `rows[r][k]` is statistic `k` in replication `r`.
    pub fn from_rows(names: &[String], rows: &[Vec<i64>]) -> Self {
        let cols: Vec<Vec<i64>> = (0..names.len())
            .map(|k| rows.iter().map(|r| r[k]).collect())
            .collect();
        let statistics: Vec<StatSummary> = names
            .iter()
            .zip(&cols)
            .map(|(n, c)| StatSummary::from_samples(n, c))
            .collect();
        let covariances = (0..names.len())
            .map(|i| {
                (0..names.len())
                    .map(|j| covariance(&cols[i], &cols[j]))
                    .collect()
            })
            .collect();
        Self {
            replications: rows.len(),
            statistics,
            covariances,
        }
    }

    pub fn get(&self, name: &str) -> Option<&StatSummary> {
        self.statistics.iter().find(|s| s.name == name)
    }
}

/// Unbiased sample covariance.
pub fn covariance(xs: &[i64], ys: &[i64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<i64>() as f64 / n;
    let my = ys.iter().sum::<i64>() as f64 / n;
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| (x as f64 - mx) * (y as f64 - my))
        .sum::<f64>()
        / (n - 1.0)
}

/// Pearson correlation; zero when either side is constant.
pub fn correlation(xs: &[i64], ys: &[i64]) -> f64 {
    let (vx, vy) = (covariance(xs, xs), covariance(ys, ys));
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    covariance(xs, ys) / (vx * vy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_reference_values() {
        // 95% points
        assert!((chi_square_sf(3.841_458_820_694_124, 1) - 0.05).abs() < 1e-9);
        assert!((chi_square_sf(7.814_727_903_251_178, 3) - 0.05).abs() < 1e-9);
        assert!((chi_square_sf(2.0, 2) - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(chi_square_sf(0.0, 4), 1.0);
    }

    #[test]
    fn normal_tails() {
        assert!((normal_two_sided(1.959_963_984_540_054) - 0.05).abs() < 1e-9);
        assert!((normal_two_sided(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_samples() {
        let s = StatSummary::from_samples("x", &[3; 10]);
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.falling[2], 6.0);
        assert_eq!(s.power_sums[2], 90);
    }

    #[test]
    fn small_sample_moments() {
        let s = StatSummary::from_samples("x", &[0, 1, 2, 3]);
        assert_eq!(s.mean, 1.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-12);
        assert!((s.central[2] - 1.25).abs() < 1e-12);
        assert_eq!(s.central[3], 0.0);
        assert_eq!(s.falling[1], 1.5);
        assert_eq!(s.falling[2], 2.0);
        assert_eq!((s.min, s.max), (0, 3));
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        let total: f64 = (0..60).map(|k| poisson_pmf(2.5, k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((poisson_pmf(0.25, 0) - (-0.25f64).exp()).abs() < 1e-15);
    }
}
