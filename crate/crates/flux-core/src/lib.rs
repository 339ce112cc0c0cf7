//! Solver and simulator toolkit for flux-penalty reporting games.
//!
//! A player consumes up to `D` units per round and each round observes a
//! partial signal `y` of their true need. They must report `b >= y` and pay
//! the report itself (single player) or a proportional share of a fixed
//! overhead (multi player), plus a *flux penalty* `r * |b - b_prev|` for
//! changing the report between consecutive rounds. The penalty makes stable,
//! truthful reporting (`b = D` every round) optimal once `r` clears a
//! threshold that depends on the horizon and the signal distribution.
//!
//! The crate provides:
//!
//! - closed-form truthfulness thresholds and the optimal-strategy classifier
//!   for the single-player Bernoulli game ([`single`]),
//! - an independent backward-induction solver over discrete report grids
//!   that verifies every closed form ([`oracle`]),
//! - the alpha-truthfulness reduction from general signal distributions to
//!   Bernoulli ([`reduction`]),
//! - cost-sharing games with Nash / dominant-strategy threshold formulas and
//!   a brute-force equilibrium checker ([`multi`]),
//! - a seeded, reproducible Monte Carlo simulator with trace auditing
//!   ([`sim`]),
//! - scenario-file parsing and figure-data emission for the `flux` CLI
//!   ([`scenario`], [`figures`]).
//!
//! Rounds are indexed by *rounds left*: round `T` is chronologically first
//! and round `1` is last. All expected-cost comparisons share one tie
//! tolerance, [`COST_TIE_TOLERANCE`], and ties break toward the larger
//! (more truthful) report.

pub mod error;
pub mod figures;
pub mod format;
pub mod multi;
pub mod oracle;
pub mod reduction;
pub mod scenario;
pub mod signal;
pub mod sim;
pub mod single;
pub mod stream;

pub use error::{FluxError, Result};
pub use signal::{Signal, SignalModel};
pub use single::{SinglePlayerGame, StrategyClass, Threshold};

/// Absolute tolerance on expected cost below which two reports count as
/// tied. Shared by the closed-form classifier, the DP oracle, and the
/// equilibrium checker so that all of them resolve boundary rates the same
/// way (toward the larger report).
pub const COST_TIE_TOLERANCE: f64 = 1e-9;
