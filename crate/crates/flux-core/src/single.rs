//! Single-player Bernoulli game: closed-form thresholds and the
//! optimal-strategy classifier.
//!
//! With `T` rounds left at the start, signals `Ber(p)` scaled to `D`, and
//! penalty rate `r`, the player's optimal behavior falls into one of five
//! regimes separated by closed-form rates:
//!
//! - [`truthful_threshold`]: the minimum `r` making honest-till-end optimal
//!   from the first round,
//! - [`history_threshold`]: the minimum `r` making it optimal to keep a full
//!   report alive with `t` rounds left after a bust.
//!
//! [`classify_strategy`] turns those rates into a [`StrategyClass`]; the DP
//! oracle in [`crate::oracle`] independently verifies every regime.

use std::fmt;

use crate::error::{FluxError, Result};
use crate::signal::SignalModel;
use crate::COST_TIE_TOLERANCE;

/// A penalty rate that may have no finite value. `r_t^(no-history)` is
/// infinite for every non-first round: no finite penalty makes a player
/// adopt a full report they never held.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite(f64),
    Infinite,
}

impl Threshold {
    pub fn finite(self) -> Option<f64> {
        match self {
            Threshold::Finite(x) => Some(x),
            Threshold::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Threshold::Infinite)
    }

    /// Fixed-format rendering for CSV and CLI output: finite rates at 9
    /// significant digits, the infinity marker as `inf`.
    pub fn display_sig9(self) -> String {
        match self {
            Threshold::Finite(x) => crate::format::sig9(x),
            Threshold::Infinite => "inf".to_string(),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(x) => write!(f, "{x}"),
            Threshold::Infinite => write!(f, "inf"),
        }
    }
}

/// Prior-report state of a player entering a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum History {
    /// Chronologically first round: nothing to compare against, no penalty.
    None,
    /// The previous round's report.
    Prior(f64),
}

/// The five optimal-play regimes of the single-player Bernoulli game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyClass {
    /// Report the signal every round, even in the last one.
    LyingTillEnd,
    /// Keep a full report alive after a bust except in the final round.
    /// Only arises for `p > 1/2`.
    LyingTillBustedPlusLieLastRound,
    /// Report the signal until first busted, then stay at `D`.
    LyingTillBusted,
    /// Report `D` from the first round on.
    HonestTillEnd,
    /// Lying-till-end behavior for the first `lie_rounds` chronological
    /// rounds, lying-till-busted for the rest. Only arises for `p <= 1/2`.
    MixedLieFirst { lie_rounds: u32 },
}

impl StrategyClass {
    /// Whether the class reports `D` in the chronologically first round.
    pub fn first_report_full(self) -> bool {
        matches!(self, StrategyClass::HonestTillEnd)
    }

    /// Whether the class keeps a full report alive (reports `D` on a zero
    /// signal) with `rounds_left` remaining, given the game horizon.
    pub fn maintains_at(self, t_rounds: u32, rounds_left: u32) -> bool {
        match self {
            StrategyClass::HonestTillEnd | StrategyClass::LyingTillBusted => true,
            StrategyClass::LyingTillEnd => false,
            StrategyClass::LyingTillBustedPlusLieLastRound => rounds_left >= 2,
            StrategyClass::MixedLieFirst { lie_rounds } => rounds_left <= t_rounds - lie_rounds,
        }
    }
}

impl fmt::Display for StrategyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyClass::LyingTillEnd => write!(f, "lying-till-end"),
            StrategyClass::LyingTillBustedPlusLieLastRound => {
                write!(f, "lying-till-busted-plus-lie-last-round")
            }
            StrategyClass::LyingTillBusted => write!(f, "lying-till-busted"),
            StrategyClass::HonestTillEnd => write!(f, "honest-till-end"),
            StrategyClass::MixedLieFirst { lie_rounds } => {
                write!(f, "mixed-lie-first-{lie_rounds}")
            }
        }
    }
}

/// A single player facing `t_rounds` rounds at penalty rate `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinglePlayerGame {
    t_rounds: u32,
    r: f64,
    model: SignalModel,
}

impl SinglePlayerGame {
    pub fn new(t_rounds: u32, r: f64, model: SignalModel) -> Result<Self> {
        check_horizon(t_rounds)?;
        check_rate(r)?;
        Ok(SinglePlayerGame { t_rounds, r, model })
    }

    pub fn t_rounds(&self) -> u32 {
        self.t_rounds
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn model(&self) -> &SignalModel {
        &self.model
    }

    /// Gross consumption `D` of the underlying model.
    pub fn d(&self) -> f64 {
        self.model.d()
    }

    /// Same game at a different penalty rate.
    pub fn with_rate(&self, r: f64) -> Result<Self> {
        SinglePlayerGame::new(self.t_rounds, r, self.model.clone())
    }
}

/// Expected costs of the two first-round commitments over a whole game
/// segment: entering honestly and staying truthful, versus reporting the
/// signal until first bust (then the segment ends in the busted state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCosts {
    pub honest: f64,
    pub lying: f64,
}

/// Minimum rate making honest-till-end optimal from the first round of a
/// `t_rounds` game: `(1 - q^T) / (p - p q^(T-1))` with `q = 1 - p`.
/// Finite, at least `1/p`, strictly decreasing in `t_rounds`.
pub fn truthful_threshold(t_rounds: u32, p: f64) -> Result<f64> {
    check_horizon(t_rounds)?;
    check_probability(p)?;
    let q = 1.0 - p;
    Ok((1.0 - q.powi(t_rounds as i32)) / (p - p * q.powi(t_rounds as i32 - 1)))
}

/// Minimum rate making it optimal to keep a full report alive with
/// `rounds_left` rounds to go. Two branches: `h(t) = (1 - q^t) /
/// (2p - p q^(t-1))` for `p <= 1/2`; for `p > 1/2` the threshold is 1 in
/// the final round and `1/(2p)` earlier.
pub fn history_threshold(rounds_left: u32, p: f64) -> Result<f64> {
    if rounds_left < 1 {
        return Err(FluxError::invalid("rounds_left", "must be at least 1"));
    }
    check_probability(p)?;
    if rounds_left == 1 {
        // Both branches reduce to (1 - q) / (2p - p) = 1 for every p;
        // returning the identity avoids rounding noise at the anchor.
        return Ok(1.0);
    }
    if p > 0.5 {
        Ok(1.0 / (2.0 * p))
    } else {
        let q = 1.0 - p;
        Ok((1.0 - q.powi(rounds_left as i32))
            / (2.0 * p - p * q.powi(rounds_left as i32 - 1)))
    }
}

/// Expected segment costs of the honest and lying first-round commitments;
/// they cross exactly at [`truthful_threshold`].
pub fn segment_costs(t_rounds: u32, p: f64, r: f64, d: f64) -> Result<SegmentCosts> {
    check_horizon(t_rounds)?;
    check_probability(p)?;
    check_rate(r)?;
    if !(d.is_finite() && d > 0.0) {
        return Err(FluxError::invalid("d", format!("must be positive, got {d}")));
    }
    let q = 1.0 - p;
    let tail = 1.0 - q.powi(t_rounds as i32 - 1);
    Ok(SegmentCosts {
        honest: d + d * (q / p) * tail,
        lying: r * d * tail,
    })
}

/// Whether reporting `D` in the chronologically first round is optimal at
/// rate `r` (ties break truthful). This is the decision the classifier and
/// the DP oracle must agree on at the root.
pub fn first_report_truthful(t_rounds: u32, p: f64, r: f64) -> Result<bool> {
    let costs = segment_costs(t_rounds, p, r, 1.0)?;
    Ok(costs.lying + COST_TIE_TOLERANCE >= costs.honest)
}

/// Whether keeping a full report alive with `rounds_left` to go is optimal
/// at rate `r` (ties break truthful).
///
/// Compares the expected cost of leaving (drop to 0 now, then play
/// optimally) against staying at `D`, each under the regime-optimal
/// continuation; the crossing sits at [`history_threshold`] and the sign of
/// the comparison is valid at every rate, so the same expression serves as
/// the decision rule on both sides of the boundary.
pub fn maintains_after_bust(rounds_left: u32, p: f64, r: f64) -> Result<bool> {
    if rounds_left < 1 {
        return Err(FluxError::invalid("rounds_left", "must be at least 1"));
    }
    check_probability(p)?;
    check_rate(r)?;
    let q = 1.0 - p;
    let g = q.powi(rounds_left as i32 - 1);
    let leave = r * (2.0 - g);
    let mut stay = 1.0 + (q / p) * (1.0 - g);
    if p > 0.5 && rounds_left >= 2 {
        // The optimal continuation for p > 1/2 drops the report again in
        // the final round (its maintain threshold is 1 > r there), shifting
        // the crossing from h(t) to 1/(2p).
        stay -= (1.0 - r) * g;
    }
    Ok(leave + COST_TIE_TOLERANCE >= stay)
}

/// The optimal-play regime at `(t_rounds, p, r)`, with ties at every
/// boundary resolved toward the more truthful class.
pub fn classify_strategy(t_rounds: u32, p: f64, r: f64) -> Result<StrategyClass> {
    if first_report_truthful(t_rounds, p, r)? {
        return Ok(StrategyClass::HonestTillEnd);
    }
    let stays: Vec<bool> = (1..t_rounds)
        .map(|t| maintains_after_bust(t, p, r))
        .collect::<Result<_>>()?;
    if stays.iter().all(|&s| s) {
        return Ok(StrategyClass::LyingTillBusted);
    }
    if stays.iter().all(|&s| !s) {
        return Ok(StrategyClass::LyingTillEnd);
    }
    if !stays[0] && stays[1..].iter().all(|&s| s) {
        // p > 1/2 band 1/(2p) <= r < 1: keep the report alive everywhere
        // but the final round.
        return Ok(StrategyClass::LyingTillBustedPlusLieLastRound);
    }
    // p <= 1/2: maintain thresholds increase with rounds left, so the stay
    // decisions form a true-prefix. The switch index t* is the last
    // rounds-left value still worth maintaining; chronologically the player
    // lies through the first T - t* rounds.
    let t_star = stays.iter().take_while(|&&s| s).count() as u32;
    debug_assert!(
        stays.iter().skip(t_star as usize).all(|&s| !s),
        "stay decisions must be a true-prefix for p <= 1/2"
    );
    Ok(StrategyClass::MixedLieFirst {
        lie_rounds: t_rounds - t_star,
    })
}

/// One row of the per-round threshold table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCurveRow {
    pub rounds_left: u32,
    /// Rate needed to adopt a full report from scratch: finite only in the
    /// first round (`rounds_left = t_rounds`).
    pub r_no_history: Threshold,
    /// Rate needed to keep a full report alive. Rows below the horizon use
    /// [`history_threshold`]; the first-round row extends the same formula.
    pub r_truthful_history: f64,
}

/// Critical thresholds for every round of a `t_rounds` game.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    pub t_rounds: u32,
    pub p: f64,
    pub rows: Vec<ThresholdCurveRow>,
}

/// Builds the threshold table for rounds-left 1..=`t_rounds`.
pub fn threshold_curve(t_rounds: u32, p: f64) -> Result<ThresholdCurve> {
    check_horizon(t_rounds)?;
    check_probability(p)?;
    let rows = (1..=t_rounds)
        .map(|t| {
            Ok(ThresholdCurveRow {
                rounds_left: t,
                r_no_history: if t == t_rounds {
                    Threshold::Finite(truthful_threshold(t_rounds, p)?)
                } else {
                    Threshold::Infinite
                },
                r_truthful_history: history_threshold(t, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdCurve { t_rounds, p, rows })
}

pub(crate) fn check_horizon(t_rounds: u32) -> Result<()> {
    if t_rounds < 2 {
        return Err(FluxError::invalid(
            "t_rounds",
            format!("the game needs more than one round, got {t_rounds}"),
        ));
    }
    Ok(())
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(FluxError::invalid(
            "p",
            format!("must lie strictly in (0, 1), got {p}"),
        ));
    }
    Ok(())
}

pub(crate) fn check_rate(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(FluxError::invalid(
            "r",
            format!("penalty rate must be finite and nonnegative, got {r}"),
        ));
    }
    Ok(())
}
