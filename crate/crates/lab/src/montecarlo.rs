//! Replicated experiments and goodness-of-fit checks.
//!
//! Replication `r` draws everything from stream `r` of the seed and results
//! are reduced in replication order, so every output depends only on the
//! configuration and never on the number of threads.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rtcn_core::chains::{Sampler, TransitionTable};
use rtcn_core::moments::CovarianceMatrix;
use rtcn_core::network::generate_with;
use rtcn_core::pattern::{Matcher, PatternId};
use rtcn_core::rng;
use serde::{Deserialize, Serialize};

use crate::data::builtin_table;
use crate::stats::{
    self, chi_square_sf, correlation, covariance, normal_two_sided, poisson_pmf, SampleSummary,
};
use crate::LabError;

/// Where the counts come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Networks from the forward construction, patterns counted by the matcher.
    Forward,
    /// A shipped transition table, counts read from the chain state.
    Chain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: Source,
    /// Pattern ids for the forward source; statistic or type names for chains.
    pub statistics: Vec<String>,
    pub n: u64,
    pub replications: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Never affects results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// Raw per-replication values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Samples {
    pub names: Vec<String>,
    /// `rows[r][k]`: statistic `k` of replication `r`.
    pub rows: Vec<Vec<i64>>,
}

impl Samples {
    pub fn column(&self, name: &str) -> Option<Vec<i64>> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn summary(&self) -> SampleSummary {
        SampleSummary::from_rows(&self.names, &self.rows)
    }

    /// CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("replication");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (r, row) in self.rows.iter().enumerate() {
            out.push_str(&r.to_string());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

enum Plan {
    Forward(Vec<Matcher>),
    Chain {
        sampler: Sampler,
        weights: Vec<Vec<i64>>,
    },
}

impl Plan {
    fn new(cfg: &ExperimentConfig) -> Result<Self, LabError> {
        match &cfg.source {
            Source::Forward => {
                let matchers = cfg
                    .statistics
                    .iter()
                    .map(|s| Ok(Matcher::new(&s.parse::<PatternId>()?.spec())?))
                    .collect::<Result<Vec<_>, LabError>>()?;
                Ok(Plan::Forward(matchers))
            }
            Source::Chain(id) => {
                let table = builtin_table(id)?;
                let weights = cfg
                    .statistics
                    .iter()
                    .map(|s| chain_weights(&table, s))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Plan::Chain {
                    sampler: Sampler::new(&table),
                    weights,
                })
            }
        }
    }

    fn replicate(&self, n: u64, seed: u64, r: u64) -> Result<Vec<i64>, LabError> {
        let mut rng = rng::stream(seed, r);
        match self {
            Plan::Forward(ms) => {
                let net = generate_with(n as usize, &mut rng)?;
                Ok(ms.iter().map(|m| m.count(&net) as i64).collect())
            }
            Plan::Chain { sampler, weights } => {
                let state = sampler.run(n, &mut rng)?;
                Ok(weights
                    .iter()
                    .map(|w| w.iter().zip(&state.counts).map(|(a, b)| a * b).sum())
                    .collect())
            }
        }
    }
}

/// Weight vector of a named statistic or type of a chain.
fn chain_weights(table: &TransitionTable, name: &str) -> Result<Vec<i64>, LabError> {
    if let Some(s) = table.statistic(name) {
        return Ok(s.weights.clone());
    }
    if let Some(i) = table.types.iter().position(|t| t.name == name) {
        let mut w = vec![0; table.arity()];
        w[i] = 1;
        return Ok(w);
    }
    Err(LabError::UnknownId(format!(
        "statistic `{name}` of chain `{}`",
        table.id
    )))
}

fn validate(cfg: &ExperimentConfig) -> Result<(), LabError> {
    if cfg.replications == 0 {
        return Err(LabError::Config("replications must be at least 1".into()));
    }
    if cfg.n < 2 {
        return Err(LabError::Config("n must be at least 2".into()));
    }
    if cfg.statistics.is_empty() {
        return Err(LabError::Config("no statistics requested".into()));
    }
    if cfg.threads == Some(0) {
        return Err(LabError::Config("threads must be positive".into()));
    }
    Ok(())
}

/// Runs every replication and keeps the raw values.
pub fn run_samples(cfg: &ExperimentConfig) -> Result<Samples, LabError> {
    validate(cfg)?;
    let plan = Plan::new(cfg)?;
    let work = || {
        (0..cfg.replications as u64)
            .into_par_iter()
            .map(|r| plan.replicate(cfg.n, cfg.seed, r))
            .collect::<Result<Vec<_>, _>>()
    };
    let rows = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| LabError::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    Ok(Samples {
        names: cfg.statistics.clone(),
        rows,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SampleSummary, LabError> {
    Ok(run_samples(cfg)?.summary())
}

/// The law a check compares against.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "law")]
pub enum Law {
    Poisson {
        lambda: f64,
    },
    Normal {
        mean: f64,
        variance: f64,
    },
    Degenerate,
    /// Product of independent Poisson laws.
    PoissonProduct {
        lambdas: Vec<f64>,
    },
    /// Trivariate normal with covariance `n·Σ`.
    Gaussian3 {
        sigma: Vec<Vec<f64>>,
    },
}

/// Outcome of one goodness-of-fit check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub law: Law,
    /// Named test statistics and z-scores.
    pub statistics: BTreeMap<String, f64>,
    /// Named p-values, all in `[0, 1]`.
    pub p_values: BTreeMap<String, f64>,
    /// Names of the sub-checks that failed.
    pub failures: Vec<String>,
    pub passed: bool,
}

impl FitReport {
    fn new(law: Law) -> Self {
        Self {
            law,
            statistics: BTreeMap::new(),
            p_values: BTreeMap::new(),
            failures: Vec::new(),
            passed: true,
        }
    }

    fn stat(&mut self, name: &str, v: f64) {
        self.statistics.insert(name.to_string(), v);
    }

    fn require(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failures.push(name.to_string());
            self.passed = false;
        }
    }
}

/// Thresholds shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Minimum chi-square p-value.
    pub p_min: f64,
    /// Standard errors allowed for moment comparisons.
    pub z_max: f64,
    /// Relative tolerance floor for variance and covariance comparisons.
    pub rel_tol: f64,
    /// Minimum expected count per chi-square bin.
    pub min_expected: f64,
    /// Largest admissible fraction of nonzero counts for a degenerate law.
    pub nonzero_max: f64,
    /// Largest admissible absolute correlation for independence.
    pub corr_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            p_min: 1e-3,
            z_max: 4.0,
            rel_tol: 0.05,
            min_expected: 5.0,
            nonzero_max: 0.01,
            corr_max: 0.02,
        }
    }
}

/// Merges the top bins of `expected` (counts per bin, the last one being the
/// tail) until every bin reaches `min`. Returns the number of bins kept.
fn merge_tail(expected: &mut Vec<f64>, observed: &mut Vec<f64>, min: f64) -> usize {
    while expected.len() > 1 && expected.last().copied().unwrap_or(0.0) < min {
        let (e, o) = (
            expected.pop().expect("len > 1"),
            observed.pop().expect("len > 1"),
        );
        *expected.last_mut().expect("len ≥ 1") += e;
        *observed.last_mut().expect("len ≥ 1") += o;
    }
    expected.len()
}

fn pearson(expected: &[f64], observed: &[f64]) -> f64 {
    expected
        .iter()
        .zip(observed)
        .map(|(e, o)| (o - e) * (o - e) / e)
        .sum()
}

/// Chi-square test against Poisson(λ) on bins {0, 1, 2, ≥3}, tail bins merged
/// until each expects at least `min_expected`; also compares the sample mean
/// with λ.
pub fn poisson_gof(samples: &[i64], lambda: f64, th: &Thresholds) -> Result<FitReport, LabError> {
    if lambda <= 0.0 {
        return Err(LabError::Config("λ must be positive".into()));
    }
    let reps = samples.len() as f64;
    let probs = [
        poisson_pmf(lambda, 0),
        poisson_pmf(lambda, 1),
        poisson_pmf(lambda, 2),
    ];
    let tail = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    let mut expected: Vec<f64> = probs.iter().chain([&tail]).map(|p| p * reps).collect();
    let mut observed = vec![0f64; 4];
    for &x in samples {
        observed[(x.max(0) as usize).min(3)] += 1.0;
    }
    let bins = merge_tail(&mut expected, &mut observed, th.min_expected);
    if bins < 2 || expected[0] < th.min_expected {
        return Err(LabError::Config(format!(
            "{} samples are too few to bin against Poisson({lambda})",
            samples.len()
        )));
    }
    let chi2 = pearson(&expected, &observed);
    let df = (bins - 1) as u32;
    let p = chi_square_sf(chi2, df);
    let mean = samples.iter().sum::<i64>() as f64 / reps;
    let z_mean = (mean - lambda) / (lambda / reps).sqrt();
    let mut rep = FitReport::new(Law::Poisson { lambda });
    rep.stat("chi_square", chi2);
    rep.stat("df", df as f64);
    rep.stat("bins", bins as f64);
    rep.stat("mean", mean);
    rep.stat("z_mean", z_mean);
    rep.p_values.insert("chi_square".into(), p);
    rep.p_values.insert("mean".into(), normal_two_sided(z_mean));
    rep.require("chi_square", p > th.p_min);
    rep.require("mean", z_mean.abs() < th.z_max);
    Ok(rep)
}

/// Compares the sample with a normal law of the given mean and variance:
/// mean within `z_max` standard errors, variance ratio within
/// `max(rel_tol, z_max·SE)`, standardized third moment within `z_max` SE of
/// 0 and fourth within `z_max` SE of 3.
pub fn normality_check(samples: &[i64], mean: f64, variance: f64, th: &Thresholds) -> FitReport {
    let s = stats::StatSummary::from_samples("x", samples);
    let reps = samples.len() as f64;
    let mut rep = FitReport::new(Law::Normal { mean, variance });
    let z_mean = (s.mean - mean) / s.se_mean.max(f64::MIN_POSITIVE);
    let ratio = s.variance / variance;
    let se_ratio = s.se_variance / variance;
    let skew = s.skewness();
    let kurt = s.kurtosis();
    let (se_skew, se_kurt) = ((6.0 / reps).sqrt(), (24.0 / reps).sqrt());
    rep.stat("sample_mean", s.mean);
    rep.stat("sample_variance", s.variance);
    rep.stat("z_mean", z_mean);
    rep.stat("variance_ratio", ratio);
    rep.stat("se_variance_ratio", se_ratio);
    rep.stat("skewness", skew);
    rep.stat("z_skewness", skew / se_skew);
    rep.stat("kurtosis", kurt);
    rep.stat("z_kurtosis", (kurt - 3.0) / se_kurt);
    rep.p_values.insert("mean".into(), normal_two_sided(z_mean));
    rep.p_values
        .insert("skewness".into(), normal_two_sided(skew / se_skew));
    rep.p_values
        .insert("kurtosis".into(), normal_two_sided((kurt - 3.0) / se_kurt));
    rep.require("mean", z_mean.abs() < th.z_max);
    rep.require(
        "variance",
        (ratio - 1.0).abs() < th.rel_tol.max(th.z_max * se_ratio),
    );
    rep.require("skewness", (skew / se_skew).abs() < th.z_max);
    rep.require("kurtosis", ((kurt - 3.0) / se_kurt).abs() < th.z_max);
    rep
}

/// Checks that at most a `nonzero_max` fraction of the counts is nonzero.
pub fn degenerate_check(samples: &[i64], th: &Thresholds) -> FitReport {
    let nonzero = samples.iter().filter(|&&x| x != 0).count() as f64 / samples.len() as f64;
    let mut rep = FitReport::new(Law::Degenerate);
    rep.stat("nonzero_fraction", nonzero);
    rep.require("nonzero_fraction", nonzero < th.nonzero_max);
    rep
}

/// Compares the covariance of `(Y, X, T)` triples divided by `n` with `Σ`,
/// entry by entry, within `max(10%, z_max·SE)`.
pub fn covariance_check(
    triples: [&[i64]; 3],
    n: u64,
    sigma: &CovarianceMatrix,
    th: &Thresholds,
) -> FitReport {
    let to_f =
        |q: &rtcn_core::Rational| num_traits::ToPrimitive::to_f64(q).expect("finite rational");
    let target: Vec<Vec<f64>> = (0..3)
        .map(|i| (0..3).map(|j| to_f(sigma.get(i, j))).collect())
        .collect();
    let mut rep = FitReport::new(Law::Gaussian3 {
        sigma: target.clone(),
    });
    let reps = triples[0].len() as f64;
    let nf = n as f64;
    let means: Vec<f64> = triples
        .iter()
        .map(|c| c.iter().sum::<i64>() as f64 / reps)
        .collect();
    for i in 0..3 {
        for j in i..3 {
            let est = covariance(triples[i], triples[j]) / nf;
            // SE from the spread of the centered products
            let prods: Vec<f64> = triples[i]
                .iter()
                .zip(triples[j])
                .map(|(&a, &b)| (a as f64 - means[i]) * (b as f64 - means[j]))
                .collect();
            let pm = prods.iter().sum::<f64>() / reps;
            let pv = prods.iter().map(|p| (p - pm) * (p - pm)).sum::<f64>() / (reps - 1.0);
            let se = (pv / reps).sqrt() / nf;
            let tol = (0.10 * target[i][j].abs()).max(th.z_max * se);
            let key = format!("sigma_{}{}", i + 1, j + 1);
            rep.stat(&key, est);
            rep.stat(&format!("{key}_se"), se);
            rep.stat(&format!("{key}_z"), (est - target[i][j]) / se);
            rep.require(&key, (est - target[i][j]).abs() <= tol);
            if i == j {
                rep.require(&format!("{key}_positive"), est > 0.0);
            }
        }
    }
    rep
}

/// Joint chi-square of `(X, C)` against independent Poisson(λx) ⊗ Poisson(λc),
/// plus the sample correlation.
pub fn independence_check(
    xs: &[i64],
    cs: &[i64],
    lambdas: [f64; 2],
    th: &Thresholds,
) -> Result<FitReport, LabError> {
    let reps = xs.len() as f64;
    // marginal bin probabilities, tail last
    let margin = |l: f64, k: usize| -> Vec<f64> {
        let mut p: Vec<f64> = (0..k as u64).map(|i| poisson_pmf(l, i)).collect();
        p.push((1.0 - p.iter().sum::<f64>()).max(0.0));
        p
    };
    let (mut px, mut pc) = (margin(lambdas[0], 3), margin(lambdas[1], 3));
    // drop the top bin of whichever margin holds the smallest cell
    loop {
        let min_cell = px
            .iter()
            .flat_map(|a| pc.iter().map(move |b| a * b * reps))
            .fold(f64::INFINITY, f64::min);
        if min_cell >= th.min_expected {
            break;
        }
        let lx = px[px.len() - 1];
        let lc = pc[pc.len() - 1];
        let target = if lx <= lc { &mut px } else { &mut pc };
        if target.len() <= 2 {
            return Err(LabError::Config("too few samples for a joint table".into()));
        }
        let last = target.pop().expect("len > 2");
        *target.last_mut().expect("len ≥ 2") += last;
    }
    let (bx, bc) = (px.len(), pc.len());
    let mut observed = vec![0f64; bx * bc];
    for (&x, &c) in xs.iter().zip(cs) {
        let i = (x.max(0) as usize).min(bx - 1);
        let j = (c.max(0) as usize).min(bc - 1);
        observed[i * bc + j] += 1.0;
    }
    let expected: Vec<f64> = px
        .iter()
        .flat_map(|a| pc.iter().map(move |b| a * b * reps))
        .collect();
    let chi2 = pearson(&expected, &observed);
    let df = (bx * bc - 1) as u32;
    let p = chi_square_sf(chi2, df);
    let corr = correlation(xs, cs);
    let mut rep = FitReport::new(Law::PoissonProduct {
        lambdas: lambdas.to_vec(),
    });
    rep.stat("chi_square", chi2);
    rep.stat("df", df as f64);
    rep.stat("correlation", corr);
    rep.p_values.insert("chi_square".into(), p);
    rep.require("chi_square", p > th.p_min);
    rep.require("correlation", corr.abs() < th.corr_max);
    for (name, col, l) in [("x", xs, lambdas[0]), ("c", cs, lambdas[1])] {
        let mean = col.iter().sum::<i64>() as f64 / reps;
        let z = (mean - l) / (l / reps).sqrt();
        rep.stat(&format!("mean_{name}"), mean);
        rep.stat(&format!("z_mean_{name}"), z);
        rep.require(&format!("mean_{name}"), z.abs() < th.z_max);
    }
    Ok(rep)
}
