//! Laboratory around `rtcn-core`: data files, text formats, Monte Carlo
//! experiments, verification suites and run manifests used by the `rtcn`
//! binary.

pub mod cli;
pub mod data;
pub mod format;
pub mod manifest;
pub mod montecarlo;
pub mod stats;
pub mod verify;

use rtcn_core::chains::ChainError;
use rtcn_core::moments::MomentError;
use rtcn_core::network::NetError;
use rtcn_core::pattern::PatternError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("invalid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Parse(#[from] format::ParseError),
    #[error(transparent)]
    Network(#[from] NetError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("bad data file: {0}")]
    Data(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("unknown {0}")]
    UnknownId(String),
}

/// Default worker count: `RTCN_THREADS` if set, else the machine's parallelism.
pub fn default_threads() -> usize {
    std::env::var("RTCN_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}
