//! Exact moment computations.
//!
//! Means of pattern counts satisfy first-order recurrences
//! `φ_{n+1} = (1 − κ/n)² φ_n + ψ_n`; this module solves them exactly, evaluates
//! the known closed forms, and supplies the Gaussian bookkeeping (mixed
//! moments, limit covariance) used by the normal limit laws.

mod closed;
mod gaussian;
mod recurrence;

use alloc::string::String;

pub use closed::{
    h3ci_mean_corrected, mean_by_recurrence, mean_closed_form, trident_moments,
    trident_variance_increments, MeanId, TridentMoments,
};
pub use gaussian::{
    asymptotic_transfer, check_proof_identity, gaussian_moment, higher_central_moment_target,
    isserlis, triples, CovarianceMatrix, Isserlis, ProofIdentity,
};
pub use recurrence::{solve_recurrence, FirstOrderRecurrence};

use crate::chains::ChainError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MomentError {
    #[error("n = {n} is below the valid range (n ≥ {min})")]
    BelowRange { n: u64, min: u64 },
    #[error("the closed form has a pole at n = {n}")]
    Singular { n: u64 },
    #[error("a recurrence needs κ ≥ 1 and a positive initial index")]
    BadRecurrence,
    #[error("transfer needs α > −2κ − 1")]
    TransferThreshold,
    #[error("not a covariance matrix: asymmetric or nonpositive diagonal")]
    NotCovariance,
    #[error("unknown statistic `{0}`")]
    UnknownStatistic(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}
