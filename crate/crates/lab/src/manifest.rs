//! Run manifests: what was run, with which inputs, and digests of what came out.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest as _, Sha256};

use crate::data::shipped_sources;

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digest {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

impl Digest {
    pub fn of(name: impl Into<String>, bytes: &[u8]) -> Self {
        Self {
            name: name.into(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Arguments after the program name, enough to re-run the command.
    pub args: Vec<String>,
    /// Fully resolved configuration, defaults included.
    pub config: Value,
    pub seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    /// Files read by the run.
    pub inputs: Vec<Digest>,
    pub outputs: Vec<Digest>,
}

/// Versions of everything that can change an output.
pub fn artifact_versions() -> BTreeMap<String, String> {
    let mut data = String::new();
    for (name, text) in shipped_sources() {
        data.push_str(&name);
        data.push('\0');
        data.push_str(text);
        data.push('\0');
    }
    BTreeMap::from([
        ("rtcn-core".to_string(), rtcn_core::VERSION.to_string()),
        (
            "rtcn-lab".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        ),
        ("data".to_string(), sha256_hex(data.as_bytes())),
    ])
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable manifest") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Outputs whose digests differ from `other`, by name.
    pub fn output_differences(&self, other: &[Digest]) -> Vec<String> {
        let theirs: BTreeMap<&str, &Digest> = other.iter().map(|d| (d.name.as_str(), d)).collect();
        let mut out: Vec<String> = self
            .outputs
            .iter()
            .filter(|d| theirs.get(d.name.as_str()).copied() != Some(*d))
            .map(|d| d.name.clone())
            .collect();
        out.extend(
            other
                .iter()
                .filter(|d| !self.outputs.iter().any(|o| o.name == d.name))
                .map(|d| d.name.clone()),
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn round_trip_and_differences() {
        let m = RunManifest {
            subcommand: "generate".into(),
            args: vec!["generate".into(), "--leaves".into(), "5".into()],
            config: serde_json::json!({ "leaves": 5 }),
            seed: Some(3),
            versions: artifact_versions(),
            inputs: vec![],
            outputs: vec![Digest::of("network", b"x")],
        };
        let back = RunManifest::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(m
            .output_differences(&[Digest::of("network", b"x")])
            .is_empty());
        assert_eq!(
            m.output_differences(&[Digest::of("network", b"y")]),
            vec!["network".to_string()]
        );
    }
}
