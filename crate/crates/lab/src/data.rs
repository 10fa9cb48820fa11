//! Pattern, transition-table and covariance data files.
//!
//! The catalog patterns and the five chain tables ship with the crate under
//! `data/` and are compiled in; the same loaders accept user files.

use std::collections::BTreeMap;

use rtcn_core::chains::{ChainType, RuleSource, Statistic, TransitionTable};
use rtcn_core::moments::CovarianceMatrix;
use rtcn_core::network::Event;
use rtcn_core::pattern::{PatternId, PatternSpec};
use rtcn_core::Rational;
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventType {
    Branch,
    Retic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternEvent {
    #[serde(rename = "type")]
    pub kind: EventType,
    pub a: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
}

/// On-disk pattern: `initial_lineages` and a list of `{type, a, b}` events.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub initial_lineages: usize,
    #[serde(default)]
    pub events: Vec<PatternEvent>,
}

impl PatternFile {
    pub fn to_spec(&self) -> Result<PatternSpec, LabError> {
        let events = self
            .events
            .iter()
            .enumerate()
            .map(|(i, e)| match (&e.kind, e.b) {
                (EventType::Branch, None) => Ok(Event::Branch(e.a)),
                (EventType::Retic, Some(b)) => Ok(Event::Retic(e.a, b)),
                (EventType::Branch, Some(_)) => Err(LabError::Data(format!(
                    "event {i}: a branching takes only `a`"
                ))),
                (EventType::Retic, None) => Err(LabError::Data(format!(
                    "event {i}: a reticulation needs `b`"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PatternSpec::new(self.initial_lineages, events)?)
    }

    pub fn from_spec(id: Option<&str>, spec: &PatternSpec) -> Self {
        let events = spec
            .events
            .iter()
            .map(|ev| match *ev {
                Event::Branch(a) => PatternEvent {
                    kind: EventType::Branch,
                    a,
                    b: None,
                },
                Event::Retic(a, b) => PatternEvent {
                    kind: EventType::Retic,
                    a,
                    b: Some(b),
                },
            })
            .collect();
        Self {
            id: id.map(str::to_string),
            initial_lineages: spec.initial_lineages,
            events,
        }
    }
}

pub fn parse_pattern(text: &str) -> Result<PatternSpec, LabError> {
    toml::from_str::<PatternFile>(text)?.to_spec()
}

fn pattern_source(id: PatternId) -> &'static str {
    match id {
        PatternId::Cherry => include_str!("../data/patterns/cherry.toml"),
        PatternId::Trident => include_str!("../data/patterns/trident.toml"),
        PatternId::AI => include_str!("../data/patterns/a-i.toml"),
        PatternId::AII => include_str!("../data/patterns/a-ii.toml"),
        PatternId::BI => include_str!("../data/patterns/b-i.toml"),
        PatternId::BII => include_str!("../data/patterns/b-ii.toml"),
        PatternId::BIII => include_str!("../data/patterns/b-iii.toml"),
        PatternId::BIV => include_str!("../data/patterns/b-iv.toml"),
        PatternId::BV => include_str!("../data/patterns/b-v.toml"),
        PatternId::CI => include_str!("../data/patterns/c-i.toml"),
        PatternId::CII => include_str!("../data/patterns/c-ii.toml"),
        PatternId::H3BI => include_str!("../data/patterns/h3-bi.toml"),
        PatternId::H3CI => include_str!("../data/patterns/h3-ci.toml"),
    }
}

/// Catalog pattern as shipped in `data/patterns`.
pub fn builtin_pattern(id: PatternId) -> PatternSpec {
    parse_pattern(pattern_source(id)).expect("shipped pattern file")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeFile {
    name: String,
    var: String,
    footprint: u32,
    patterns: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatisticFile {
    name: String,
    weights: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleFile {
    label: String,
    delta: BTreeMap<String, i64>,
    numerator: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    id: String,
    types: Vec<TypeFile>,
    #[serde(default)]
    statistics: Vec<StatisticFile>,
    rules: Vec<RuleFile>,
}

/// Parses a transition table. Deltas name the types they change; missing
/// types are unchanged.
pub fn parse_table(text: &str) -> Result<TransitionTable, LabError> {
    let file: TableFile = toml::from_str(text)?;
    let types = file
        .types
        .iter()
        .map(|t| {
            let mut chars = t.var.chars();
            let var = match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii_lowercase() && c != 'n' => c,
                _ => {
                    return Err(LabError::Data(format!(
                        "type {}: variable must be one lowercase letter other than n",
                        t.name
                    )))
                }
            };
            let patterns = t
                .patterns
                .iter()
                .map(|(id, w)| Ok((id.parse::<PatternId>()?, *w)))
                .collect::<Result<Vec<_>, LabError>>()?;
            Ok(ChainType {
                name: t.name.clone(),
                var,
                footprint: t.footprint,
                patterns,
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let statistics = file
        .statistics
        .into_iter()
        .map(|s| Statistic {
            name: s.name,
            weights: s.weights,
        })
        .collect();
    let rules = file
        .rules
        .into_iter()
        .map(|r| {
            let mut delta = vec![0i64; types.len()];
            for (name, d) in &r.delta {
                let i = types.iter().position(|t| &t.name == name).ok_or_else(|| {
                    LabError::Data(format!("rule `{}`: unknown type `{name}`", r.label))
                })?;
                delta[i] = *d;
            }
            Ok(RuleSource {
                label: r.label,
                delta,
                numerator: r.numerator,
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    Ok(TransitionTable::new(&file.id, types, statistics, rules)?)
}

/// Ids of the shipped chains.
pub const TABLE_IDS: [&str; 5] = ["trident", "a-i", "b-iv", "b-i", "c-i"];

/// Text of a shipped transition table.
pub fn table_source(id: &str) -> Result<&'static str, LabError> {
    Ok(match id {
        "trident" => include_str!("../data/tables/trident.toml"),
        "a-i" => include_str!("../data/tables/a-i.toml"),
        "b-iv" => include_str!("../data/tables/b-iv.toml"),
        "b-i" => include_str!("../data/tables/b-i.toml"),
        "c-i" => include_str!("../data/tables/c-i.toml"),
        _ => return Err(LabError::UnknownId(format!("table `{id}`"))),
    })
}

/// One of the shipped transition tables.
pub fn builtin_table(id: &str) -> Result<TransitionTable, LabError> {
    parse_table(table_source(id)?)
}

/// Every shipped data file with a stable name, in a fixed order.
pub fn shipped_sources() -> Vec<(String, &'static str)> {
    let mut out: Vec<(String, &'static str)> = PatternId::ALL
        .iter()
        .map(|&id| (format!("patterns/{id}.toml"), pattern_source(id)))
        .collect();
    out.extend(TABLE_IDS.iter().map(|id| {
        (
            format!("tables/{id}.toml"),
            table_source(id).expect("shipped table"),
        )
    }));
    out.push(("sigma.toml".into(), SIGMA_SOURCE));
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SigmaFile {
    entries: Vec<Vec<String>>,
}

/// Parses a 3×3 covariance matrix written as rational strings.
pub fn parse_sigma(text: &str) -> Result<CovarianceMatrix, LabError> {
    let file: SigmaFile = toml::from_str(text)?;
    if file.entries.len() != 3 || file.entries.iter().any(|r| r.len() != 3) {
        return Err(LabError::Data("covariance matrix must be 3×3".into()));
    }
    let q = |s: &str| {
        s.trim()
            .parse::<Rational>()
            .map_err(|_| LabError::Data(format!("`{s}` is not a rational")))
    };
    let row = |i: usize| -> Result<[Rational; 3], LabError> {
        Ok([
            q(&file.entries[i][0])?,
            q(&file.entries[i][1])?,
            q(&file.entries[i][2])?,
        ])
    };
    Ok(CovarianceMatrix::new([row(0)?, row(1)?, row(2)?])?)
}

pub const SIGMA_SOURCE: &str = include_str!("../data/sigma.toml");

/// The shipped limit covariance.
pub fn builtin_sigma() -> CovarianceMatrix {
    parse_sigma(SIGMA_SOURCE).expect("shipped covariance file")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rtcn_core::chains::trident_table;

    #[test]
    fn shipped_patterns_match_catalog() {
        for id in PatternId::ALL {
            assert_eq!(builtin_pattern(id), id.spec(), "{id}");
            assert_eq!(
                toml::from_str::<PatternFile>(pattern_source(id))
                    .unwrap()
                    .id
                    .as_deref(),
                Some(id.name())
            );
        }
    }

    #[test]
    fn pattern_file_round_trip() {
        let spec = PatternId::CII.spec();
        let text = toml::to_string(&PatternFile::from_spec(Some("c-ii"), &spec)).unwrap();
        assert_eq!(parse_pattern(&text).unwrap(), spec);
    }

    #[test]
    fn malformed_patterns() {
        assert!(
            parse_pattern("initial_lineages = 2\nevents = [{ type = \"branch\", a = 0 }]").is_err()
        );
        assert!(
            parse_pattern("initial_lineages = 1\nevents = [{ type = \"retic\", a = 0 }]").is_err()
        );
        assert!(
            parse_pattern("initial_lineages = 1\nevents = [{ type = \"twist\", a = 0 }]").is_err()
        );
    }

    #[test]
    fn shipped_trident_table_equals_core() {
        assert_eq!(builtin_table("trident").unwrap(), trident_table());
    }

    #[test]
    fn shipped_tables_parse() {
        for id in TABLE_IDS {
            let t = builtin_table(id).unwrap();
            assert_eq!(t.id, id);
        }
        assert!(builtin_table("b-ii").is_err());
    }

    #[test]
    fn shipped_sigma_equals_core() {
        assert_eq!(builtin_sigma(), CovarianceMatrix::limit());
    }

    #[test]
    fn unknown_delta_type() {
        let text = include_str!("../data/tables/trident.toml")
            .replace("delta = { T = -1 }", "delta = { Q = -1 }");
        assert!(matches!(parse_table(&text), Err(LabError::Data(_))));
    }
}
