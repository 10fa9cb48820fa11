//! Ranked tree-child networks as a pure, allocation-only library.
//!
//! The crate covers the forward construction of networks, counting of fringe
//! patterns, the multi-type Markov chains that track pattern counts, and exact
//! rational moment computations. Everything here is `no_std` + `alloc`; file
//! formats, Monte Carlo drivers and the command line live in `rtcn-lab`.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chains;
pub mod conjecture;
pub mod moments;
pub mod network;
pub mod pattern;
pub mod rng;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

/// Exact arbitrary-precision rational number.
pub type Rational = BigRational;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
