//! Verification suites: exact oracle comparisons and Monte Carlo fits of the
//! limit laws, grouped into the ten acceptance criteria.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};
use rtcn_core::chains::{exact_distribution, MomentKind, TransitionTable, DEFAULT_STATE_BUDGET};
use rtcn_core::conjecture::{
    classify_catalog, enumerate_patterns, published_label, BaseMode, Classifier,
};
use rtcn_core::moments::{
    check_proof_identity, h3ci_mean_corrected, mean_by_recurrence, mean_closed_form,
    trident_variance_increments, triples, CovarianceMatrix, Isserlis, MeanId,
};
use rtcn_core::network::{enumerate_histories, generate_with, history_count};
use rtcn_core::pattern::{count_occurrences_bruteforce, Matcher, PatternId};
use rtcn_core::{rng, Rational};
use serde::Serialize;
use serde_json::{json, Value};

use crate::data::{builtin_sigma, builtin_table, TABLE_IDS};
use crate::montecarlo::{
    covariance_check, degenerate_check, independence_check, normality_check, poisson_gof,
    run_samples, ExperimentConfig, FitReport, Samples, Source, Thresholds,
};
use crate::LabError;

/// Named collections of checks runnable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorem1,
    Theorem2a,
    Theorem2b,
    Theorem2c,
    Prop3,
    Prop4,
    Coupling,
    Moments,
    Conjecture,
    Matcher,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Theorem1,
        Suite::Theorem2a,
        Suite::Theorem2b,
        Suite::Theorem2c,
        Suite::Prop3,
        Suite::Prop4,
        Suite::Coupling,
        Suite::Moments,
        Suite::Conjecture,
        Suite::Matcher,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2a => "theorem2a",
            Suite::Theorem2b => "theorem2b",
            Suite::Theorem2c => "theorem2c",
            Suite::Prop3 => "prop3",
            Suite::Prop4 => "prop4",
            Suite::Coupling => "coupling",
            Suite::Moments => "moments",
            Suite::Conjecture => "conjecture",
            Suite::Matcher => "matcher",
        }
    }

    fn groups(self) -> &'static [Group] {
        use Group::*;
        match self {
            Suite::Theorem1 => &[TridentClt],
            Suite::Theorem2a => &[Degenerate],
            Suite::Theorem2b => &[PoissonTable],
            Suite::Theorem2c => &[NormalPatterns],
            Suite::Prop3 => &[H3biDegenerate, Independence],
            Suite::Prop4 => &[Covariance, Algebra],
            Suite::Coupling => &[Coupling],
            Suite::Moments => &[Means, VarianceTrend, Algebra],
            Suite::Conjecture => &[Conjecture],
            Suite::Matcher => &[Matcher],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| LabError::UnknownId(format!("suite `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Group {
    Coupling,
    Means,
    VarianceTrend,
    TridentClt,
    PoissonTable,
    Degenerate,
    H3biDegenerate,
    NormalPatterns,
    Covariance,
    Independence,
    Algebra,
    Conjecture,
    Matcher,
}

/// The acceptance criteria, in order, with their check groups.
pub const CRITERIA: [(u8, &str); 10] = [
    (1, "coupling exactness for n ≤ 7"),
    (2, "mean closed forms against their recurrences"),
    (3, "trident CLT at n = 2000"),
    (4, "Poisson laws of b-i..b-v at n = 1000"),
    (5, "degenerate laws of a-i, a-ii, h3-bi"),
    (6, "normal laws of c-i, c-ii and the limit covariance"),
    (7, "joint Poisson law of (b-i, cherry)"),
    (8, "Gaussian moment identities"),
    (9, "conjecture classifier on the catalog"),
    (10, "fast matcher against brute force"),
];

fn criterion_groups(k: u8) -> &'static [Group] {
    use Group::*;
    match k {
        1 => &[Coupling],
        2 => &[Means],
        3 => &[TridentClt],
        4 => &[PoissonTable],
        5 => &[Degenerate, H3biDegenerate],
        6 => &[NormalPatterns, Covariance],
        7 => &[Independence],
        8 => &[Algebra],
        9 => &[Conjecture],
        10 => &[Matcher],
        _ => &[],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: Value) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }

    fn fit(name: impl Into<String>, rep: &FitReport) -> Self {
        Self::new(
            name,
            rep.passed,
            serde_json::to_value(rep).expect("serializable report"),
        )
    }
}

/// Outcome of a suite or criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Findings that do not fail the run, such as known misprints.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub replications: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub sigma: CovarianceMatrix,
    pub thresholds: Thresholds,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            replications: 100_000,
            seed: 20_240_601,
            threads: None,
            sigma: builtin_sigma(),
            thresholds: Thresholds::default(),
        }
    }
}

/// Runs checks, reusing simulated samples across groups.
#[derive(Debug)]
pub struct Verifier {
    opts: VerifyOptions,
    cache: BTreeMap<&'static str, Samples>,
    notes: Vec<String>,
}

fn f(q: &Rational) -> f64 {
    q.to_f64().expect("finite rational")
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

impl Verifier {
    pub fn new(opts: VerifyOptions) -> Self {
        Self {
            opts,
            cache: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn options(&self) -> &VerifyOptions {
        &self.opts
    }

    pub fn run_suite(&mut self, suite: Suite) -> Result<Report, LabError> {
        self.run_groups(suite.name().to_string(), suite.groups())
    }

    pub fn run_criterion(&mut self, k: u8) -> Result<Report, LabError> {
        if criterion_groups(k).is_empty() {
            return Err(LabError::UnknownId(format!("criterion {k}")));
        }
        self.run_groups(format!("criterion{k}"), criterion_groups(k))
    }

    fn run_groups(&mut self, name: String, groups: &[Group]) -> Result<Report, LabError> {
        self.notes.clear();
        let mut checks = Vec::new();
        for &g in groups {
            checks.extend(self.group(g)?);
        }
        Ok(Report {
            suite: name,
            passed: checks.iter().all(|c| c.passed),
            checks,
            notes: self.notes.clone(),
        })
    }

    fn group(&mut self, g: Group) -> Result<Vec<Check>, LabError> {
        match g {
            Group::Coupling => coupling(),
            Group::Means => self.means(),
            Group::VarianceTrend => variance_trend(),
            Group::TridentClt => self.trident_clt(),
            Group::PoissonTable => self.poisson_table(),
            Group::Degenerate => self.degenerate(),
            Group::H3biDegenerate => self.h3bi_degenerate(),
            Group::NormalPatterns => self.normal_patterns(),
            Group::Covariance => self.covariance(),
            Group::Independence => self.independence(),
            Group::Algebra => Ok(algebra(&self.opts.sigma)),
            Group::Conjecture => Ok(conjecture()),
            Group::Matcher => Ok(matcher(self.opts.seed)),
        }
    }

    fn samples(&mut self, key: &'static str) -> Result<&Samples, LabError> {
        if !self.cache.contains_key(key) {
            let (source, stats, n): (Source, &[&str], u64) = match key {
                "forward-1000" => (Source::Forward, &["b-ii", "b-iii", "b-v", "a-ii"], 1000),
                "forward-2000" => (Source::Forward, &["c-ii"], 2000),
                "trident" => (Source::Chain("trident".into()), &["trident"], 2000),
                "a-i" => (Source::Chain("a-i".into()), &["a-i"], 1000),
                "b-iv" => (Source::Chain("b-iv".into()), &["b-iv"], 1000),
                "b-i" => (
                    Source::Chain("b-i".into()),
                    &["b-i", "cherry", "h3-bi"],
                    1000,
                ),
                "c-i" => (
                    Source::Chain("c-i".into()),
                    &["h3-ci", "c-i", "trident"],
                    2000,
                ),
                _ => unreachable!("unknown sample set {key}"),
            };
            let cfg = ExperimentConfig {
                source,
                statistics: stats.iter().map(|s| s.to_string()).collect(),
                n,
                replications: self.opts.replications,
                seed: self.opts.seed,
                threads: self.opts.threads,
            };
            let s = run_samples(&cfg)?;
            self.cache.insert(key, s);
        }
        Ok(&self.cache[key])
    }

    fn column(&mut self, key: &'static str, stat: &str) -> Result<Vec<i64>, LabError> {
        Ok(self
            .samples(key)?
            .column(stat)
            .expect("statistic present in sample set"))
    }

    fn means(&mut self) -> Result<Vec<Check>, LabError> {
        let mut out = Vec::new();
        let mu = mean_by_recurrence(MeanId::Trident, 200)?;
        let bad: Vec<u64> = (4..=200u64)
            .filter(|&n| {
                mean_closed_form(MeanId::Trident, n).ok().as_ref() != Some(&mu[(n - 2) as usize])
            })
            .collect();
        let spot = mean_closed_form(MeanId::Trident, 4)? == q(2, 3);
        out.push(Check::new(
            "trident mean: closed form = recurrence, 4 ≤ n ≤ 200",
            bad.is_empty() && spot,
            json!({ "mismatches": bad, "mu_4_is_2_3": spot }),
        ));

        let rho = mean_by_recurrence(MeanId::CI, 60)?;
        let bad: Vec<u64> = (6..=60u64)
            .filter(|&n| {
                mean_closed_form(MeanId::CI, n).ok().as_ref() != Some(&rho[(n - 2) as usize])
            })
            .collect();
        out.push(Check::new(
            "c-i mean: closed form = recurrence, 6 ≤ n ≤ 60",
            bad.is_empty(),
            json!({ "mismatches": bad }),
        ));

        let tau = mean_by_recurrence(MeanId::H3CI, 60)?;
        let printed_bad: Vec<u64> = (8..=60u64)
            .filter(|&n| {
                mean_closed_form(MeanId::H3CI, n).ok().as_ref() != Some(&tau[(n - 2) as usize])
            })
            .collect();
        let corrected_bad: Vec<u64> = (8..=60u64)
            .filter(|&n| h3ci_mean_corrected(n).ok().as_ref() != Some(&tau[(n - 2) as usize]))
            .collect();
        if !printed_bad.is_empty() {
            self.notes.push(format!(
                "h3-ci printed closed form disagrees with its recurrence at {} of 53 values of n in 8..=60; \
                 the form with −66905671n² and +66128140n inside the bracket agrees at {} of 53",
                printed_bad.len(),
                53 - corrected_bad.len()
            ));
        }
        out.push(Check::new(
            "h3-ci mean: corrected closed form = recurrence, 8 ≤ n ≤ 60",
            corrected_bad.is_empty(),
            json!({
                "printed_form_mismatches": printed_bad.len(),
                "corrected_form_mismatches": corrected_bad,
                "tau_7": tau[5].to_string(),
            }),
        ));

        // the chain's exact law is itself checked against enumeration for n ≤ 7
        let table = builtin_table("c-i")?;
        let mut bad = Vec::new();
        for n in 2..=24u64 {
            let d = exact_distribution(&table, n, DEFAULT_STATE_BUDGET)?;
            let y = d.moment(
                &table.statistic("h3-ci").expect("h3-ci").weights,
                1,
                MomentKind::Raw,
            );
            let x = d.moment(
                &table.statistic("c-i").expect("c-i").weights,
                1,
                MomentKind::Raw,
            );
            if y != tau[(n - 2) as usize] || x != rho[(n - 2) as usize] {
                bad.push(n);
            }
        }
        out.push(Check::new(
            "c-i and h3-ci mean recurrences = exact chain means, n ≤ 24",
            bad.is_empty(),
            json!({ "mismatches": bad }),
        ));
        Ok(out)
    }

    fn trident_clt(&mut self) -> Result<Vec<Check>, LabError> {
        let n = 2000u64;
        let xs = self.column("trident", "trident")?;
        let mean = f(&mean_closed_form(MeanId::Trident, n)?);
        let var = 24.0 * n as f64 / 637.0;
        Ok(vec![Check::fit(
            "trident count, n = 2000",
            &normality_check(&xs, mean, var, &self.opts.thresholds),
        )])
    }

    fn poisson_table(&mut self) -> Result<Vec<Check>, LabError> {
        let cases: [(&str, &'static str, i64); 5] = [
            ("b-i", "b-i", 8),
            ("b-ii", "forward-1000", 28),
            ("b-iii", "forward-1000", 56),
            ("b-iv", "b-iv", 14),
            ("b-v", "forward-1000", 28),
        ];
        let mut out = Vec::new();
        for (pat, key, den) in cases {
            let xs = self.column(key, pat)?;
            let rep = poisson_gof(&xs, 1.0 / den as f64, &self.opts.thresholds)?;
            out.push(Check::fit(
                format!("{pat} ~ Poisson(1/{den}), n = 1000"),
                &rep,
            ));
        }
        Ok(out)
    }

    fn degenerate(&mut self) -> Result<Vec<Check>, LabError> {
        let th = self.opts.thresholds;
        let mut out = vec![
            Check::fit(
                "a-i degenerate, n = 1000",
                &degenerate_check(&self.column("a-i", "a-i")?, &th),
            ),
            Check::fit(
                "a-ii degenerate, n = 1000",
                &degenerate_check(&self.column("forward-1000", "a-ii")?, &th),
            ),
        ];
        let n = 200u64;
        let table = builtin_table("a-i")?;
        let d = exact_distribution(&table, n, DEFAULT_STATE_BUDGET)?;
        let mean = d.moment(
            &table.statistic("a-i").expect("a-i").weights,
            1,
            MomentKind::Raw,
        );
        let target = q(1, 10 * n as i64);
        let rel = f(&((&mean - &target) / &target));
        out.push(Check::new(
            "a-i exact mean at n = 200 within 25% of 1/(10n)",
            rel.abs() < 0.25,
            json!({ "mean": f(&mean), "target": f(&target), "relative_error": rel, "states": d.len() }),
        ));
        Ok(out)
    }

    fn h3bi_degenerate(&mut self) -> Result<Vec<Check>, LabError> {
        let xs = self.column("b-i", "h3-bi")?;
        Ok(vec![Check::fit(
            "h3-bi degenerate, n = 1000",
            &degenerate_check(&xs, &self.opts.thresholds),
        )])
    }

    fn normal_patterns(&mut self) -> Result<Vec<Check>, LabError> {
        let n = 2000u64;
        let th = self.opts.thresholds;
        // exact finite-n means; the variances are the leading terms
        let rho = f(&mean_closed_form(MeanId::CI, n)?);
        let nf = n as f64;
        let ci = self.column("c-i", "c-i")?;
        let cii = self.column("forward-2000", "c-ii")?;
        let mut out = Vec::new();
        for (name, xs, mean, var) in [
            ("c-i", &ci, rho, 4575916.0 * nf / 137582445.0),
            ("c-ii", &cii, rho / 2.0, 2930764.0 * nf / 137582445.0),
        ] {
            let mut rep = normality_check(xs, mean, var, &th);
            let root_n = rep.statistics["skewness"] * nf.sqrt();
            rep.statistics.insert("skewness_root_n".into(), root_n);
            if rep.failures.iter().any(|f| f == "skewness") {
                self.notes.push(format!(
                    "{name}: sample skewness {:.4} at n = {n}, i.e. {root_n:.2}/√n; a finite-n term that the \
                     third-moment test resolves at {} replications",
                    rep.statistics["skewness"],
                    xs.len()
                ));
            }
            out.push(Check::fit(format!("{name} normal, n = 2000"), &rep));
        }
        Ok(out)
    }

    fn covariance(&mut self) -> Result<Vec<Check>, LabError> {
        let y = self.column("c-i", "h3-ci")?;
        let x = self.column("c-i", "c-i")?;
        let t = self.column("c-i", "trident")?;
        let rep = covariance_check([&y, &x, &t], 2000, &self.opts.sigma, &self.opts.thresholds);
        Ok(vec![Check::fit(
            "(h3-ci, c-i, trident) covariance / n, n = 2000",
            &rep,
        )])
    }

    fn independence(&mut self) -> Result<Vec<Check>, LabError> {
        let x = self.column("b-i", "b-i")?;
        let c = self.column("b-i", "cherry")?;
        let rep = independence_check(&x, &c, [1.0 / 8.0, 1.0 / 4.0], &self.opts.thresholds)?;
        Ok(vec![Check::fit(
            "(b-i, cherry) ~ Poisson(1/8) ⊗ Poisson(1/4), n = 1000",
            &rep,
        )])
    }
}

/// Pattern ids needed to evaluate every shipped table's types.
fn type_counts(table: &TransitionTable, pattern_counts: &BTreeMap<PatternId, i64>) -> Vec<i64> {
    table
        .types
        .iter()
        .map(|t| {
            t.patterns
                .iter()
                .map(|(id, w)| w * pattern_counts[id])
                .sum()
        })
        .collect()
}

fn coupling() -> Result<Vec<Check>, LabError> {
    let tables: Vec<TransitionTable> = TABLE_IDS
        .iter()
        .map(|id| builtin_table(id))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for t in &tables {
        let rep = t.validate(30);
        out.push(Check::new(
            format!("{} table: numerators sum to n², none negative, n ≤ 30", t.id),
            rep.is_valid(),
            json!({ "symbolic": rep.symbolic_sum_ok, "states": rep.states_checked, "violations": rep.violations.len() }),
        ));
    }
    let matchers: Vec<(PatternId, Matcher)> = PatternId::ALL
        .iter()
        .map(|&id| Ok((id, Matcher::new(&id.spec())?)))
        .collect::<Result<_, LabError>>()?;
    let mut mismatches: BTreeMap<String, Vec<usize>> =
        tables.iter().map(|t| (t.id.clone(), Vec::new())).collect();
    let mut cii_half = Vec::new();
    let mut probability_ok = true;
    for n in 2..=7usize {
        let total = history_count(n);
        let mut laws: Vec<BTreeMap<Vec<i64>, u64>> = vec![BTreeMap::new(); tables.len()];
        let (mut ci, mut cii) = (0i64, 0i64);
        for (net, p) in enumerate_histories(n)? {
            probability_ok &= p == Rational::new(1.into(), total.into());
            let counts: BTreeMap<PatternId, i64> = matchers
                .iter()
                .map(|(id, m)| (*id, m.count(&net) as i64))
                .collect();
            ci += counts[&PatternId::CI];
            cii += counts[&PatternId::CII];
            for (law, t) in laws.iter_mut().zip(&tables) {
                *law.entry(type_counts(t, &counts)).or_default() += 1;
            }
        }
        if ci != 2 * cii {
            cii_half.push(n);
        }
        for (law, t) in laws.iter().zip(&tables) {
            let enumerated: BTreeMap<Vec<i64>, Rational> = law
                .iter()
                .map(|(k, &c)| (k.clone(), Rational::new(c.into(), total.into())))
                .collect();
            let exact = exact_distribution(t, n as u64, DEFAULT_STATE_BUDGET)?.to_map();
            if enumerated != exact {
                mismatches.get_mut(&t.id).expect("table id").push(n);
            }
        }
    }
    for t in &tables {
        let bad = &mismatches[&t.id];
        out.push(Check::new(
            format!("{} chain law = enumerated law, n ≤ 7", t.id),
            bad.is_empty(),
            json!({ "mismatched_n": bad }),
        ));
    }
    out.push(Check::new(
        "every history has probability 1/∏ℓ², n ≤ 7",
        probability_ok,
        json!({ "histories_at_7": history_count(7).to_string() }),
    ));
    out.push(Check::new(
        "E[c-ii] = E[c-i]/2, n ≤ 7",
        cii_half.is_empty(),
        json!({ "mismatched_n": cii_half }),
    ));
    Ok(out)
}

fn variance_trend() -> Result<Vec<Check>, LabError> {
    let inc = trident_variance_increments(25)?;
    let v: BTreeMap<u64, f64> = inc.iter().map(|(n, r)| (*n, f(r))).collect();
    let limit = 24.0 / 49.0;
    let increasing = (12..24).all(|n| v[&(n + 1)] > v[&n]);
    let extrapolated = 25.0 * v[&24] - 24.0 * v[&23];
    let rel = (extrapolated - limit) / limit;
    Ok(vec![Check::new(
        "Var(T_{n+1}) − (1−6/n)² Var(T_n) increases toward 24/49",
        increasing && rel.abs() < 0.10,
        json!({ "raw_at_24": v[&24], "extrapolated": extrapolated, "relative_error": rel, "limit": limit }),
    )])
}

fn algebra(sigma: &CovarianceMatrix) -> Vec<Check> {
    let mut iss = Isserlis::new(sigma.clone());
    let pairing = iss.check_pairing_recurrences(10);
    let mut failed = Vec::new();
    let mut count = 0;
    for (r, s, t) in triples(8).into_iter().filter(|&(r, s, t)| r + s + t >= 2) {
        count += 1;
        let id = check_proof_identity(&mut iss, r, s, t);
        if !id.holds() {
            failed.push(json!({
                "r": r, "s": s, "t": t,
                "tilde_c": id.tilde_c.to_string(),
                "reduced": id.reduced.to_string(),
                "weighted": id.weighted.to_string(),
            }));
        }
    }
    let spot = iss.moment(0, 0, 2) == q(24, 637) && iss.moment(1, 1, 0) == q(433528, 62537475);
    vec![
        Check::new(
            "Isserlis moments satisfy all three pairing recurrences, r+s+t ≤ 10",
            pairing.is_none(),
            json!({ "first_failure": pairing.map(|(r, s, t, axis)| json!([r, s, t, axis])) }),
        ),
        Check::new(
            "weighted toll identity (29r/2 + 21s/2 + 13t/2), r+s+t ≤ 8",
            failed.is_empty() && spot,
            json!({ "checked": count, "failures": failed.iter().take(5).collect::<Vec<_>>(), "failed": failed.len(), "spot_values": spot }),
        ),
    ]
}

fn conjecture() -> Vec<Check> {
    let mut out = Vec::new();
    for mode in [BaseMode::TrivialNormal, BaseMode::HeightOne] {
        let labels = classify_catalog(mode);
        let wrong: Vec<String> = labels
            .iter()
            .filter(|(id, l)| published_label(**id) != **l)
            .map(|(id, _)| id.to_string())
            .collect();
        let table: BTreeMap<String, String> = labels
            .iter()
            .map(|(id, l)| (id.to_string(), l.to_string()))
            .collect();
        out.push(Check::new(
            format!("catalog classification, {mode:?} base"),
            wrong.is_empty(),
            json!({ "labels": table, "wrong": wrong }),
        ));
    }
    let mut a = Classifier::new(BaseMode::TrivialNormal);
    let mut b = Classifier::new(BaseMode::HeightOne);
    let mut disagree = 0;
    let mut ambiguous = 0;
    let levels = enumerate_patterns(3);
    for p in levels.iter().flatten() {
        if a.classify(p).ok() != b.classify(p).ok() {
            disagree += 1;
        }
        if a.classify_all(p).map(|s| s.len() > 1).unwrap_or(true) {
            ambiguous += 1;
        }
    }
    out.push(Check::new(
        "base modes agree on every shape of height ≤ 3",
        disagree == 0,
        json!({ "shapes": levels.iter().map(Vec::len).collect::<Vec<_>>(), "disagreements": disagree, "removal_order_dependent": ambiguous }),
    ));
    out
}

fn matcher(seed: u64) -> Vec<Check> {
    let matchers: Vec<(PatternId, Matcher)> = PatternId::ALL
        .iter()
        .map(|&id| (id, Matcher::new(&id.spec()).expect("catalog pattern")))
        .collect();
    let mut failures = Vec::new();
    let mut total = 0u64;
    for r in 0..1000u64 {
        let mut g = rng::stream(seed ^ 0x006d_6174_6368_6572, r);
        let n = 3 + rng::below(&mut g, 28) as usize;
        let net = generate_with(n, &mut g).expect("n ≥ 3");
        for (id, m) in &matchers {
            let fast = m.count(&net);
            let brute =
                count_occurrences_bruteforce(&net, &id.spec()).expect("within brute-force guards");
            total += fast;
            if fast != brute && failures.len() < 10 {
                failures.push(json!({ "replication": r, "n": n, "pattern": id.name(), "fast": fast, "brute": brute }));
            }
        }
    }
    vec![Check::new(
        "fast count = brute-force count, 1000 networks with n ≤ 30, all catalog patterns",
        failures.is_empty(),
        json!({ "occurrences": total, "failures": failures }),
    )]
}

/// Exact check that probabilities of a law sum to one (used in tests).
pub fn sums_to_one(law: &BTreeMap<Vec<i64>, Rational>) -> bool {
    law.values().fold(Rational::zero(), |a, b| a + b).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("theorem9".parse::<Suite>().is_err());
    }

    #[test]
    fn exact_suites_pass() {
        let mut v = Verifier::new(VerifyOptions::default());
        for s in [Suite::Conjecture, Suite::Moments] {
            let rep = v.run_suite(s).unwrap();
            assert!(
                rep.passed,
                "{}",
                serde_json::to_string_pretty(&rep).unwrap()
            );
        }
    }

    #[test]
    fn perturbed_sigma_fails_algebra() {
        let mut e = CovarianceMatrix::limit().entries().clone();
        e[2][2] = q(25, 637);
        let opts = VerifyOptions {
            sigma: CovarianceMatrix::new(e).unwrap(),
            ..VerifyOptions::default()
        };
        let rep = Verifier::new(opts).run_criterion(8).unwrap();
        assert!(!rep.passed);
    }
}
