use proptest::prelude::*;
use rtcn_core::chains::{exact_distribution, MomentKind, DEFAULT_STATE_BUDGET};
use rtcn_core::moments::CovarianceMatrix;
use rtcn_lab::data::{builtin_table, TABLE_IDS};
use rtcn_lab::montecarlo::{
    covariance_check, normality_check, poisson_gof, run_samples, ExperimentConfig, Source,
    Thresholds,
};
use rtcn_lab::stats::{chi_square_sf, gamma_q, poisson_pmf, StatSummary};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

fn cfg(source: Source, stats: &[&str], n: u64, reps: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        source,
        statistics: stats.iter().map(|s| s.to_string()).collect(),
        n,
        replications: reps,
        seed,
        threads: None,
    }
}

#[test]
fn results_do_not_depend_on_threads() {
    for base in [
        cfg(Source::Forward, &["cherry", "trident", "c-i"], 60, 400, 9),
        cfg(
            Source::Chain("c-i".into()),
            &["h3-ci", "c-i", "trident"],
            300,
            400,
            9,
        ),
    ] {
        let reference = run_samples(&base).unwrap();
        for t in [1, 2, 5] {
            let other = run_samples(&ExperimentConfig {
                threads: Some(t),
                ..base.clone()
            })
            .unwrap();
            assert_eq!(other, reference, "threads = {t}");
        }
    }
}

#[test]
fn bad_configurations() {
    let ok = cfg(Source::Forward, &["cherry"], 10, 10, 0);
    assert!(run_samples(&ExperimentConfig {
        replications: 0,
        ..ok.clone()
    })
    .is_err());
    assert!(run_samples(&ExperimentConfig { n: 1, ..ok.clone() }).is_err());
    assert!(run_samples(&ExperimentConfig {
        threads: Some(0),
        ..ok.clone()
    })
    .is_err());
    assert!(run_samples(&ExperimentConfig {
        statistics: vec!["nope".into()],
        ..ok.clone()
    })
    .is_err());
    assert!(run_samples(&cfg(Source::Chain("b-i".into()), &["c-i"], 10, 10, 0)).is_err());
    assert!(run_samples(&cfg(Source::Chain("zz".into()), &["c-i"], 10, 10, 0)).is_err());
}

// Forward construction and every chain agree on the means of the chain's
// statistics at small n.
#[test]
fn forward_means_match_exact_chain_means() {
    let reps = 20_000;
    for n in [5u64, 7] {
        for id in TABLE_IDS {
            let table = builtin_table(id).unwrap();
            let names: Vec<&str> = table.statistics.iter().map(|s| s.name.as_str()).collect();
            let samples = run_samples(&cfg(Source::Forward, &names, n, reps, 40 + n)).unwrap();
            let law = exact_distribution(&table, n, DEFAULT_STATE_BUDGET).unwrap();
            for s in &table.statistics {
                let mean = law.moment(&s.weights, 1, MomentKind::Raw);
                let var = law.moment(&s.weights, 2, MomentKind::Central);
                let (mean, var): (f64, f64) = (
                    num_traits::ToPrimitive::to_f64(&mean).unwrap(),
                    num_traits::ToPrimitive::to_f64(&var).unwrap(),
                );
                let got = samples.summary().get(&s.name).unwrap().mean;
                let se = (var / reps as f64).sqrt().max(1e-12);
                assert!(
                    (got - mean).abs() < 4.5 * se + 1e-12,
                    "{id}/{} n = {n}: {got} vs {mean}",
                    s.name
                );
            }
        }
    }
}

#[test]
fn chain_and_forward_sources_agree_at_moderate_n() {
    let reps = 4000;
    let f = run_samples(&cfg(
        Source::Forward,
        &["trident", "cherry", "b-i"],
        150,
        reps,
        3,
    ))
    .unwrap()
    .summary();
    let c = run_samples(&cfg(
        Source::Chain("b-i".into()),
        &["b-i", "cherry"],
        150,
        reps,
        4,
    ))
    .unwrap()
    .summary();
    let t = run_samples(&cfg(
        Source::Chain("trident".into()),
        &["trident"],
        150,
        reps,
        5,
    ))
    .unwrap()
    .summary();
    for (name, other) in [("trident", &t), ("cherry", &c), ("b-i", &c)] {
        let (a, b) = (f.get(name).unwrap(), other.get(name).unwrap());
        let se = (a.se_mean.powi(2) + b.se_mean.powi(2)).sqrt();
        assert!(
            (a.mean - b.mean).abs() < 4.5 * se,
            "{name}: {} vs {}",
            a.mean,
            b.mean
        );
    }
}

#[test]
fn wrong_poisson_rate_is_rejected() {
    let xs = run_samples(&cfg(
        Source::Chain("b-iv".into()),
        &["b-iv"],
        1000,
        20_000,
        17,
    ))
    .unwrap()
    .column("b-iv")
    .unwrap();
    let th = Thresholds::default();
    assert!(poisson_gof(&xs, 1.0 / 14.0, &th).unwrap().passed);
    let wrong = poisson_gof(&xs, 0.25, &th).unwrap();
    assert!(!wrong.passed);
    assert!(wrong.p_values["chi_square"] < 1e-6);
}

#[test]
fn doubled_scale_fails_the_variance_check() {
    let n = 600u64;
    let xs = run_samples(&cfg(
        Source::Chain("trident".into()),
        &["trident"],
        n,
        20_000,
        2,
    ))
    .unwrap()
    .column("trident")
    .unwrap();
    let th = Thresholds::default();
    let mean = num_traits::ToPrimitive::to_f64(
        &rtcn_core::moments::mean_closed_form(rtcn_core::moments::MeanId::Trident, n).unwrap(),
    )
    .unwrap();
    let var = 24.0 * n as f64 / 637.0;
    assert!(normality_check(&xs, mean, var, &th).passed);
    let doubled = normality_check(&xs, mean, 4.0 * var, &th);
    assert_eq!(doubled.failures, vec!["variance".to_string()]);
}

#[test]
fn covariance_check_rejects_a_wrong_matrix() {
    let n = 400;
    let s = run_samples(&cfg(
        Source::Chain("c-i".into()),
        &["h3-ci", "c-i", "trident"],
        n,
        20_000,
        6,
    ))
    .unwrap();
    let (y, x, t) = (
        s.column("h3-ci").unwrap(),
        s.column("c-i").unwrap(),
        s.column("trident").unwrap(),
    );
    let th = Thresholds::default();
    let mut e = CovarianceMatrix::limit().entries().clone();
    e[1][1] = &e[1][1] * rtcn_core::Rational::from_integer(2.into());
    let wrong = covariance_check([&y, &x, &t], n, &CovarianceMatrix::new(e).unwrap(), &th);
    assert!(!wrong.passed);
    assert!(
        wrong.failures.iter().any(|f| f.contains("22")),
        "{:?}",
        wrong.failures
    );
}

#[test]
fn special_functions_match_statrs() {
    for df in [1u32, 2, 3, 5, 8, 20, 60] {
        let d = ChiSquared::new(df as f64).unwrap();
        for x in [0.01, 0.5, 1.0, 3.3, 7.0, 15.0, 40.0, 90.0] {
            let (a, b) = (chi_square_sf(x, df), d.sf(x));
            assert!(
                (a - b).abs() < 1e-10 * b.max(1e-300) + 1e-14,
                "df {df} x {x}: {a} vs {b}"
            );
        }
    }
    for a in [0.5, 1.0, 2.5, 10.0, 40.0] {
        for x in [0.1, 1.0, 5.0, 12.0, 50.0] {
            let (p, q) = (gamma_q(a, x), statrs::function::gamma::gamma_ur(a, x));
            assert!(
                (p - q).abs() < 1e-10 * q.max(1e-300) + 1e-14,
                "a {a} x {x}: {p} vs {q}"
            );
        }
    }
    for lambda in [1.0 / 56.0, 0.125, 0.25, 3.0] {
        let d = Poisson::new(lambda).unwrap();
        for k in 0..8u64 {
            assert!((poisson_pmf(lambda, k) - d.pmf(k)).abs() < 1e-13);
        }
    }
}

proptest! {
    #[test]
    fn summary_matches_direct_formulas(xs in proptest::collection::vec(-50i64..200, 2..300)) {
        let s = StatSummary::from_samples("x", &xs);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<i64>() as f64 / n;
        let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let m3 = xs.iter().map(|&x| (x as f64 - mean).powi(3)).sum::<f64>() / n;
        prop_assert!((s.mean - mean).abs() < 1e-9 * mean.abs().max(1.0));
        prop_assert!((s.variance - var).abs() < 1e-7 * var.max(1.0));
        prop_assert!((s.central[3] - m3).abs() < 1e-6 * m3.abs().max(1.0));
        prop_assert_eq!(s.min, *xs.iter().min().unwrap());
        prop_assert_eq!(s.max, *xs.iter().max().unwrap());
    }
}
