use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::poly::{CompiledPoly, Poly, MAX_VARS};
use super::ChainError;
use crate::network::Network;
use crate::pattern::{count_occurrences, PatternId};

/// A tracked pattern type of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainType {
    pub name: String,
    /// Variable standing for this type's count in rule numerators.
    pub var: char,
    /// External lineages covered by one pattern of this type.
    pub footprint: u32,
    /// The type count as an integer combination of catalog pattern counts.
    pub patterns: Vec<(PatternId, i64)>,
}

/// A reported statistic as an integer combination of type counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statistic {
    pub name: String,
    pub weights: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionRule {
    pub label: String,
    pub delta: Vec<i64>,
    /// Probability times `n²`.
    pub numerator: Poly,
}

/// A multi-type chain given by its rules; variables are `n` followed by the
/// type variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    pub id: String,
    pub types: Vec<ChainType>,
    pub statistics: Vec<Statistic>,
    pub rules: Vec<TransitionRule>,
}

/// One rule with a numerator as source text, before variable resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSource {
    pub label: String,
    pub delta: Vec<i64>,
    pub numerator: String,
}

impl TransitionTable {
    /// Builds a table, parsing every numerator over `n` and the type variables.
    pub fn new(
        id: &str,
        types: Vec<ChainType>,
        statistics: Vec<Statistic>,
        rules: Vec<RuleSource>,
    ) -> Result<Self, ChainError> {
        if types.is_empty() || types.len() + 1 > MAX_VARS {
            return Err(ChainError::Malformed(alloc::format!(
                "{} types",
                types.len()
            )));
        }
        let vars = Self::vars_of(&types);
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(ChainError::Malformed(alloc::format!(
                    "variable `{v}` declared twice"
                )));
            }
        }
        for s in &statistics {
            if s.weights.len() != types.len() {
                return Err(ChainError::Malformed(alloc::format!(
                    "statistic `{}` has wrong arity",
                    s.name
                )));
            }
        }
        let rules = rules
            .into_iter()
            .map(|r| {
                if r.delta.len() != types.len() {
                    return Err(ChainError::Malformed(alloc::format!(
                        "rule `{}` has wrong delta arity",
                        r.label
                    )));
                }
                let numerator =
                    Poly::parse(&r.numerator, &vars).map_err(|e| ChainError::Numerator {
                        label: r.label.clone(),
                        error: e,
                    })?;
                Ok(TransitionRule {
                    label: r.label,
                    delta: r.delta,
                    numerator,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            id: id.to_string(),
            types,
            statistics,
            rules,
        })
    }

    fn vars_of(types: &[ChainType]) -> Vec<char> {
        core::iter::once('n')
            .chain(types.iter().map(|t| t.var))
            .collect()
    }

    /// `n` followed by the type variables.
    pub fn vars(&self) -> Vec<char> {
        Self::vars_of(&self.types)
    }

    pub fn arity(&self) -> usize {
        self.types.len()
    }

    pub fn statistic(&self, name: &str) -> Option<&Statistic> {
        self.statistics.iter().find(|s| s.name == name)
    }

    /// Type counts of a network computed from its pattern counts.
    pub fn type_counts(&self, net: &Network) -> Vec<i64> {
        self.types
            .iter()
            .map(|t| {
                t.patterns
                    .iter()
                    .map(|&(id, w)| {
                        w * count_occurrences(net, &id.spec()).expect("catalog pattern") as i64
                    })
                    .sum()
            })
            .collect()
    }

    /// Counts at `n = 2`, read off the unique two-leaf network.
    pub fn initial_counts(&self) -> Vec<i64> {
        self.type_counts(&Network::initial())
    }

    /// Lineages covered by tracked types.
    pub fn occupied(&self, counts: &[i64]) -> i64 {
        self.types
            .iter()
            .zip(counts)
            .map(|(t, &c)| t.footprint as i64 * c)
            .sum()
    }

    pub fn is_feasible(&self, n: i64, counts: &[i64]) -> bool {
        counts.iter().all(|&c| c >= 0) && self.occupied(counts) <= n
    }

    /// Sum of all numerators minus `n²`, as a polynomial.
    pub fn defect(&self) -> Poly {
        let arity = self.arity() + 1;
        let mut sum = Poly::zero(arity);
        for r in &self.rules {
            sum = sum.add(&r.numerator).expect("small coefficients");
        }
        sum.sub(&Poly::var(0, arity).pow(2).expect("n^2"))
            .expect("small coefficients")
    }

    /// Checks that the numerators sum to `n²` symbolically and at every
    /// feasible state with `n ≤ n_max`, and that none is negative there.
    pub fn validate(&self, n_max: i64) -> TableReport {
        let mut report = TableReport {
            symbolic_sum_ok: self.defect().is_zero(),
            ..TableReport::default()
        };
        let k = self.arity();
        let mut values = alloc::vec![0i64; k + 1];
        for n in 2..=n_max {
            values[0] = n;
            let mut counts = alloc::vec![0i64; k];
            loop {
                if self.occupied(&counts) <= n {
                    report.states_checked += 1;
                    values[1..].copy_from_slice(&counts);
                    let mut sum = 0i128;
                    for r in &self.rules {
                        let v = r.numerator.eval(&values);
                        if v < 0 {
                            report.violations.push(TableViolation::Negative {
                                label: r.label.clone(),
                                n,
                                counts: counts.clone(),
                                value: v,
                            });
                        }
                        sum += v;
                    }
                    if sum != (n as i128) * (n as i128) {
                        report.violations.push(TableViolation::Sum {
                            n,
                            counts: counts.clone(),
                            sum,
                        });
                    }
                }
                // odometer over counts with the footprint bound
                let mut i = 0;
                loop {
                    if i == k {
                        break;
                    }
                    counts[i] += 1;
                    if self.occupied(&counts) <= n {
                        break;
                    }
                    counts[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
        }
        report
    }

    /// Rules prepared for sampling: compiled numerators, ordered by falling
    /// degree in `n` so the bulk of the mass is met first.
    pub fn compile(&self) -> CompiledTable {
        let mut order: Vec<usize> = (0..self.rules.len()).collect();
        order.sort_by_key(|&i| core::cmp::Reverse(self.rules[i].numerator.degree_in(0)));
        let rules = order
            .into_iter()
            .map(|i| {
                let r = &self.rules[i];
                (CompiledPoly::new(&r.numerator), r.delta.clone(), i)
            })
            .collect();
        CompiledTable {
            rules,
            footprints: self.types.iter().map(|t| t.footprint as i64).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableReport {
    pub symbolic_sum_ok: bool,
    pub states_checked: u64,
    pub violations: Vec<TableViolation>,
}

impl TableReport {
    pub fn is_valid(&self) -> bool {
        self.symbolic_sum_ok && self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableViolation {
    Sum {
        n: i64,
        counts: Vec<i64>,
        sum: i128,
    },
    Negative {
        label: String,
        n: i64,
        counts: Vec<i64>,
        value: i128,
    },
}

/// Sampling form of a table.
#[derive(Debug, Clone)]
pub struct CompiledTable {
    /// `(numerator, delta, index of the rule in the source table)`.
    pub(crate) rules: Vec<(CompiledPoly, Vec<i64>, usize)>,
    pub(crate) footprints: Vec<i64>,
}

/// The trident chain: one type, stepping down by `3t(3t-2)` and up by
/// `(n-3t)(n-3t-1)` out of `n²`.
pub fn trident_table() -> TransitionTable {
    let types = alloc::vec![ChainType {
        name: "T".to_string(),
        var: 't',
        footprint: 3,
        patterns: alloc::vec![(PatternId::Trident, 1)],
    }];
    let statistics = alloc::vec![Statistic {
        name: "trident".to_string(),
        weights: alloc::vec![1]
    }];
    let rule = |label: &str, d: i64, num: &str| RuleSource {
        label: label.to_string(),
        delta: alloc::vec![d],
        numerator: num.to_string(),
    };
    let rules = alloc::vec![
        rule("a trident is destroyed", -1, "3t(3t-2)"),
        rule("a trident is created", 1, "(n-3t)(n-3t-1)"),
        rule("no change", 0, "n^2 - 3t(3t-2) - (n-3t)(n-3t-1)"),
    ];
    TransitionTable::new("trident", types, statistics, rules).expect("trident table")
}
