//! Monte Carlo laboratory for delta hedging an option on a two-asset blend
//! while trading only one of the assets, or neither.
//!
//! The pipeline is:
//!
//! 1. [`paths`] simulates correlated geometric Brownian motion for both assets.
//! 2. [`hedge`] replays the discrete rebalancing ledger with proportional costs.
//! 3. [`experiment`] aggregates outcomes over parameter grids, deterministically
//!    and in parallel.
//! 4. [`decision`] ranks wrong-asset, right-asset and no-hedge strategies by
//!    risk-adjusted value.
//! 5. [`config`] and [`report`] handle the text config and CSV/JSON outputs.
//!
//! [`analytic`] holds the closed-form benchmarks used throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons reject NaN

pub mod analytic;
pub mod cli;
pub mod config;
pub mod decision;
mod error;
pub mod experiment;
pub mod hedge;
pub mod manifest;
pub mod paths;
pub mod report;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};

/// Seed used by the shipped configs and the built-in validation suite.
pub const DEFAULT_SEED: u64 = 42;
