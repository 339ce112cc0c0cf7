//! Multi-player cost sharing: threshold formulas, expected-cost bounds, and
//! brute-force equilibrium verification.
//!
//! `n` symmetric players split a fixed overhead `C >= n*D` in proportion to
//! their reports (evenly when everyone reports zero), and each pays the flux
//! penalty on their own report changes. Closed forms give the rates at which
//! all-truthful play becomes a Nash equilibrium ([`ne_threshold`]) or a
//! dominant-strategy equilibrium ([`dse_threshold`]); [`best_response`] and
//! [`check_equilibrium`] verify them by explicit backward induction against
//! fixed opponent policies.
//!
//! Opponent policies are deliberately restricted to stationary functions of
//! (rounds left, own history, own signal, number of zeros among the other
//! players' histories). That family is symmetric-sufficient for the games
//! checked here and keeps dominant-strategy enumeration tractable; it is a
//! falsification harness for the closed forms, not a proof.

use std::fmt;

use crate::error::{FluxError, Result};
use crate::oracle::DEFAULT_STATE_CAP;
use crate::signal::SignalModel;
use crate::single::{check_horizon, check_probability, check_rate, truthful_threshold, Threshold};
use crate::reduction::AlphaLevel;
use crate::COST_TIE_TOLERANCE;

/// Which equilibrium notion a check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    /// No unilateral deviation against all-truthful opponents.
    Ne,
    /// Truthful is a best response against every opponent profile.
    Dse,
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquilibriumKind::Ne => write!(f, "ne"),
            EquilibriumKind::Dse => write!(f, "dse"),
        }
    }
}

/// `n` players sharing overhead `c` over `t_rounds` rounds at rate `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPlayerGame {
    n: usize,
    c: f64,
    t_rounds: u32,
    r: f64,
    model: SignalModel,
}

impl MultiPlayerGame {
    pub fn new(n: usize, c: f64, t_rounds: u32, r: f64, model: SignalModel) -> Result<Self> {
        check_players(n)?;
        check_horizon(t_rounds)?;
        check_rate(r)?;
        check_overhead(n, c, model.d())?;
        Ok(MultiPlayerGame { n, c, t_rounds, r, model })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
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

    pub fn d(&self) -> f64 {
        self.model.d()
    }

    /// Same game at a different penalty rate.
    pub fn with_rate(&self, r: f64) -> Result<Self> {
        MultiPlayerGame::new(self.n, self.c, self.t_rounds, r, self.model.clone())
    }
}

/// Group history: every player's prior report, absent only in the first
/// round.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupHistory {
    pub prior: Vec<Option<f64>>,
}

impl GroupHistory {
    /// Zeros among all entries except player `i`'s.
    pub fn zeros_excluding(&self, i: usize) -> usize {
        self.prior
            .iter()
            .enumerate()
            .filter(|&(j, b)| j != i && *b == Some(0.0))
            .count()
    }
}

/// Proportional overhead split: `c * b_i / sum(b)`, or an even `c/n` split
/// when every report is zero. Payments always sum to `c` exactly; any
/// floating-point residue is folded into the largest share (which keeps
/// zero reports at exactly zero payment).
pub fn cost_share(reports: &[f64], c: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    cost_share_into(reports, c, &mut out)?;
    Ok(out)
}

/// [`cost_share`] writing into a caller-owned buffer; the equilibrium
/// recursion calls this in its inner loop.
pub(crate) fn cost_share_into(reports: &[f64], c: f64, out: &mut Vec<f64>) -> Result<()> {
    if reports.is_empty() {
        return Err(FluxError::invalid("reports", "need at least one report"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(FluxError::invalid("c", format!("overhead must be positive, got {c}")));
    }
    for &b in reports {
        if !(b.is_finite() && b >= 0.0) {
            return Err(FluxError::invalid(
                "reports",
                format!("reports must be nonnegative, got {b}"),
            ));
        }
    }
    let n = reports.len();
    out.clear();
    let all_equal = reports.iter().all(|&b| b == reports[0]);
    if all_equal {
        out.resize(n, c / n as f64);
    } else {
        let sum: f64 = reports.iter().sum();
        out.extend(reports.iter().map(|&b| c * (b / sum)));
    }
    // Make the plain left-to-right sum of the output exactly c. Rebuilding
    // the last positive share as c minus the prefix ahead of it settles
    // almost every input in one pass. The exception is a round-half-even
    // tie: the subtraction's error can sit exactly between representable
    // sums, and the tie resolves away from c on both sides. Re-deriving an
    // earlier positive share against a strictly descending prefix target
    // shifts the alignment off the tie; the cursor never revisits a value,
    // so nested ties cannot trap the loop.
    if out.iter().sum::<f64>() == c {
        return Ok(());
    }
    let last = out
        .iter()
        .rposition(|&s| s > 0.0)
        .expect("a positive overhead forces a positive share");
    let mut cursor: Option<f64> = None;
    for _ in 0..(64 + 4 * n) {
        let prefix: f64 = out[..last].iter().sum();
        let cand = c - prefix;
        if cand > 0.0 {
            out[last] = cand;
        }
        if out.iter().sum::<f64>() == c {
            return Ok(());
        }
        let target = cursor.map_or(prefix, |t| t.min(prefix)).next_down();
        cursor = Some(target);
        let mut placed = false;
        for m in (0..last).rev() {
            if out[m] <= 0.0 {
                continue;
            }
            let head: f64 = out[..m].iter().sum();
            let between: f64 = out[m + 1..last].iter().sum();
            let cm = (target - head) - between;
            if cm > 0.0 {
                out[m] = cm;
                placed = true;
                break;
            }
        }
        if !placed {
            break;
        }
    }
    Err(FluxError::invalid(
        "reports",
        "cost shares failed to normalize to the exact total",
    ))
}

/// Rate above which all-truthful play is a Nash equilibrium:
/// `(C/(nD)) * truthful_threshold(T, p)`.
pub fn ne_threshold(t_rounds: u32, p: f64, n: usize, c: f64, d: f64) -> Result<f64> {
    check_players(n)?;
    check_overhead(n, c, d)?;
    let scale = c / (n as f64 * d);
    Ok(scale * truthful_threshold(t_rounds, p)?)
}

/// Rate above which all-truthful play is a dominant-strategy equilibrium:
/// the Nash rate times `(1 - (1-p)^(n-1)) / p`.
pub fn dse_threshold(t_rounds: u32, p: f64, n: usize, c: f64, d: f64) -> Result<f64> {
    check_players(n)?;
    check_overhead(n, c, d)?;
    let q = 1.0 - p;
    let scale = c / (n as f64 * d);
    let factor = (1.0 - q.powi(n as i32 - 1)) / p;
    Ok(scale * factor * truthful_threshold(t_rounds, p)?)
}

/// Sufficient rates for alpha-truthful equilibria under a general signal
/// model: the Bernoulli formulas at `p = P(y >= alpha*D)` scaled by
/// `1/alpha`, with the dominant-strategy factor using exponent `n`. Upper
/// bounds, not minima.
pub fn alpha_threshold_multi(
    kind: EquilibriumKind,
    t_rounds: u32,
    model: &SignalModel,
    alpha: AlphaLevel,
    n: usize,
    c: f64,
    d: f64,
) -> Result<Threshold> {
    check_players(n)?;
    check_overhead(n, c, d)?;
    if (model.d() - d).abs() > 1e-12 * d {
        return Err(FluxError::invalid(
            "d",
            format!("must match the model's gross consumption {}", model.d()),
        ));
    }
    let p = model.busted_probability(alpha.value())?;
    if p >= 1.0 {
        return Err(FluxError::DegenerateBusted { alpha: alpha.value() });
    }
    if p <= 0.0 {
        return Ok(Threshold::Infinite);
    }
    let scale = c / (n as f64 * d);
    let ne = (1.0 / alpha.value()) * scale * truthful_threshold(t_rounds, p)?;
    Ok(Threshold::Finite(match kind {
        EquilibriumKind::Ne => ne,
        EquilibriumKind::Dse => {
            let q = 1.0 - p;
            ne * ((1.0 - q.powi(n as i32)) / p)
        }
    }))
}

/// Closed-form upper bound on `Delta EC_t` (the expected-cost gap between
/// entering a round with a truthful versus a zero history) when every other
/// player's history is zero:
/// `M * sum_{i=1..t} q^i - p r D * sum_{i=0..t-1} q^i` with
/// `M = (C/n) (1 - q^(n-1)) / p`.
pub fn delta_ec_bound(rounds_left: u32, p: f64, n: usize, c: f64, d: f64, r: f64) -> Result<f64> {
    if rounds_left < 1 {
        return Err(FluxError::invalid("rounds_left", "must be at least 1"));
    }
    check_players(n)?;
    check_probability(p)?;
    check_rate(r)?;
    check_overhead(n, c, d)?;
    let q = 1.0 - p;
    let m = (c / n as f64) * (1.0 - q.powi(n as i32 - 1)) / p;
    let mut busted_sum = 0.0;
    let mut penalty_sum = 0.0;
    let mut q_pow = 1.0;
    for _ in 0..rounds_left {
        penalty_sum += q_pow;
        q_pow *= q;
        busted_sum += q_pow;
    }
    Ok(m * busted_sum - p * r * d * penalty_sum)
}

/// A stationary reporting rule for one player in the Bernoulli group game:
/// what to report on a zero signal, as a function of rounds left, own
/// history, and how many of the *other* players' histories are zero. A
/// busted signal always forces a full report.
#[derive(Debug, Clone, PartialEq)]
pub struct OpponentPolicy {
    label: String,
    t_rounds: u32,
    n: usize,
    first_truthful: bool,
    /// `on_zero[t-1][own_hist][z]`: report `D` on a zero signal with `t`
    /// rounds left, own history zero (0) or full (1), and `z` zeros among
    /// the other `n-1` players' histories.
    on_zero: Vec<[Vec<bool>; 2]>,
}

impl OpponentPolicy {
    fn uniform(label: &str, t_rounds: u32, n: usize, first: bool, zero_hist: bool, full_hist: bool) -> Self {
        let on_zero = (1..t_rounds)
            .map(|_| [vec![zero_hist; n], vec![full_hist; n]])
            .collect();
        OpponentPolicy {
            label: label.to_string(),
            t_rounds,
            n,
            first_truthful: first,
            on_zero,
        }
    }

    /// Report `D` every round regardless of history or signal.
    pub fn honest(t_rounds: u32, n: usize) -> Self {
        Self::uniform("honest-till-end", t_rounds, n, true, true, true)
    }

    /// Report the signal every round.
    pub fn lying_till_end(t_rounds: u32, n: usize) -> Self {
        Self::uniform("lying-till-end", t_rounds, n, false, false, false)
    }

    /// Report the signal until first busted, then stay at `D`.
    pub fn lying_till_busted(t_rounds: u32, n: usize) -> Self {
        Self::uniform("lying-till-busted", t_rounds, n, false, false, true)
    }

    /// A policy from an explicit per-(rounds-left, history) bit table,
    /// independent of the zero count. Bit layout: `bits[(t-1)*2 + hist]`.
    pub fn from_bits(t_rounds: u32, n: usize, first_truthful: bool, bits: u64) -> Self {
        let on_zero = (1..t_rounds)
            .map(|t| {
                let zero_hist = bits >> ((t - 1) * 2) & 1 == 1;
                let full_hist = bits >> ((t - 1) * 2 + 1) & 1 == 1;
                [vec![zero_hist; n], vec![full_hist; n]]
            })
            .collect();
        OpponentPolicy {
            label: format!("table-first{}-bits{:b}", u8::from(first_truthful), bits),
            t_rounds,
            n,
            first_truthful,
            on_zero,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn t_rounds(&self) -> u32 {
        self.t_rounds
    }

    /// Report `D` in the chronologically first round on a zero signal?
    pub fn first_report_truthful(&self) -> bool {
        self.first_truthful
    }

    /// Report `D` on a zero signal at `rounds_left < t_rounds`?
    pub fn report_full_on_zero(
        &self,
        rounds_left: u32,
        own_truthful: bool,
        zeros_among_others: usize,
    ) -> bool {
        self.on_zero[rounds_left as usize - 1][usize::from(own_truthful)][zeros_among_others]
    }

    /// The report value for a simulation state. `own_history` is `None`
    /// exactly in the first round.
    pub fn report(
        &self,
        rounds_left: u32,
        own_history: Option<f64>,
        signal: f64,
        zeros_among_others: usize,
        d: f64,
    ) -> f64 {
        if signal > 0.0 {
            return d.max(signal);
        }
        let full = match own_history {
            None => self.first_truthful,
            Some(h) => self.report_full_on_zero(rounds_left, h > 0.0, zeros_among_others),
        };
        if full {
            d
        } else {
            0.0
        }
    }
}

/// All symmetric opponent profiles the dominant-strategy check enumerates:
/// every zero-count-independent bit table over (first round, rounds-left,
/// own history). The named basic strategies are members.
pub fn dse_profile_family(t_rounds: u32, n: usize) -> Vec<OpponentPolicy> {
    let mut profiles = Vec::new();
    for first in [false, true] {
        for bits in 0..(1u64 << (2 * (t_rounds - 1))) {
            profiles.push(OpponentPolicy::from_bits(t_rounds, n, first, bits));
        }
    }
    profiles
}

/// Joint history/signal state count of a best-response solve, the quantity
/// the cap guards.
pub fn multi_state_count(t_rounds: u32, n: usize) -> u64 {
    let m = n as u32 - 1;
    let masks = 1u128 << m.min(100);
    let per_round = 2u128 * masks * 2 * masks;
    let total = 1 + (t_rounds as u128 - 1) * per_round;
    u64::try_from(total).unwrap_or(u64::MAX)
}

/// Value table of a best-response solve.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseValues {
    root: f64,
    /// `by_state[t-1][own_hist][mask]`; mask bit `j` set = opponent `j`
    /// holds a full history.
    by_state: Vec<[Vec<f64>; 2]>,
}

impl BestResponseValues {
    pub fn root_value(&self) -> f64 {
        self.root
    }

    pub fn state_value(&self, rounds_left: u32, own_truthful: bool, mask: usize) -> f64 {
        if rounds_left == 0 {
            return 0.0;
        }
        self.by_state[rounds_left as usize - 1][usize::from(own_truthful)][mask]
    }
}

/// Decision table of a best-response solve (reports on zero signals; busted
/// signals force `D`).
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponsePolicy {
    first_on_zero: bool,
    /// `on_zero[t-1][own_hist][mask]` = report `D`?
    on_zero: Vec<[Vec<bool>; 2]>,
}

impl BestResponsePolicy {
    pub fn first_report_full(&self) -> bool {
        self.first_on_zero
    }

    pub fn reports_full_on_zero(&self, rounds_left: u32, own_truthful: bool, mask: usize) -> bool {
        self.on_zero[rounds_left as usize - 1][usize::from(own_truthful)][mask]
    }

    /// True when the policy is truthful in every state: the profile of an
    /// honest-till-end player.
    pub fn is_honest_till_end(&self) -> bool {
        self.first_on_zero
            && self
                .on_zero
                .iter()
                .all(|per_t| per_t[1].iter().all(|&full| full))
    }
}

/// Best response of one player against fixed opponent policies.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub value: f64,
    pub policy: BestResponsePolicy,
    pub values: BestResponseValues,
}

/// Solves player 0's optimal policy against `opponents` (one policy per
/// other player) by backward induction over the joint history space.
pub fn best_response(game: &MultiPlayerGame, opponents: &[OpponentPolicy]) -> Result<BestResponse> {
    best_response_capped(game, opponents, DEFAULT_STATE_CAP)
}

/// [`best_response`] with an explicit state cap.
pub fn best_response_capped(
    game: &MultiPlayerGame,
    opponents: &[OpponentPolicy],
    cap: u64,
) -> Result<BestResponse> {
    solve_against(game, opponents, None, cap)
}

/// Expected total cost for player 0 when they follow `own` (instead of
/// optimizing) against `opponents`.
pub fn evaluate_policy(
    game: &MultiPlayerGame,
    own: &OpponentPolicy,
    opponents: &[OpponentPolicy],
) -> Result<f64> {
    Ok(solve_against(game, opponents, Some(own), DEFAULT_STATE_CAP)?.value)
}

/// Brute-force Delta EC: the best-response value gap between entering state
/// `(rounds_left, opponents' mask)` with a full versus a zero own history.
/// Positive means the truthful history costs more.
pub fn delta_ec_brute(
    game: &MultiPlayerGame,
    opponents: &[OpponentPolicy],
    rounds_left: u32,
    mask: usize,
) -> Result<f64> {
    let br = best_response(game, opponents)?;
    Ok(br.values.state_value(rounds_left, true, mask)
        - br.values.state_value(rounds_left, false, mask))
}

/// The shared engine: optimize player 0's choices, or force them to follow
/// `forced`, against fixed opponents.
fn solve_against(
    game: &MultiPlayerGame,
    opponents: &[OpponentPolicy],
    forced: Option<&OpponentPolicy>,
    cap: u64,
) -> Result<BestResponse> {
    let n = game.n();
    let t_rounds = game.t_rounds();
    let p = game.model().bernoulli_p().ok_or(FluxError::BernoulliRequired {
        context: "best_response",
    })?;
    if opponents.len() != n - 1 {
        return Err(FluxError::invalid(
            "opponents",
            format!("need {} opponent policies, got {}", n - 1, opponents.len()),
        ));
    }
    for pol in opponents.iter().chain(forced) {
        if pol.t_rounds != t_rounds || pol.n != n {
            return Err(FluxError::invalid(
                "opponents",
                "policy shaped for a different game (t_rounds or n mismatch)",
            ));
        }
    }
    let required = multi_state_count(t_rounds, n);
    if required > cap {
        return Err(FluxError::StateCapExceeded { required, cap });
    }

    let q = 1.0 - p;
    let d = game.d();
    let c = game.c();
    let r = game.r();
    let m = n - 1;
    let masks = 1usize << m;

    // P(opponent-signal combo); bit set = that opponent busted this round.
    let combo_prob: Vec<f64> = (0..masks)
        .map(|combo| {
            (0..m)
                .map(|j| if combo >> j & 1 == 1 { p } else { q })
                .product()
        })
        .collect();

    let mut reports = vec![0.0; n];
    let mut shares = Vec::with_capacity(n);

    // Expected immediate share + continuation for a fixed own report.
    // `histories` carries the opponents' mask, or None in the first round.
    let mut step = |own_report_full: bool,
                    rounds_left: u32,
                    own_hist: Option<bool>,
                    mask: Option<usize>,
                    v_next: &[Vec<f64>; 2]|
     -> f64 {
        let own_level = if own_report_full { d } else { 0.0 };
        let penalty = match own_hist {
            Some(h) => r * (own_level - if h { d } else { 0.0 }).abs(),
            None => 0.0,
        };
        let mut expected = penalty;
        for (combo, &prob) in combo_prob.iter().enumerate() {
            let mut next_mask = 0usize;
            reports[0] = own_level;
            for j in 0..m {
                let full = if combo >> j & 1 == 1 {
                    true
                } else {
                    match mask {
                        None => opponents[j].first_truthful,
                        Some(mask) => {
                            let own_zero = usize::from(own_hist != Some(true));
                            let zeros_elsewhere = (0..m)
                                .filter(|&k| k != j && mask >> k & 1 == 0)
                                .count();
                            opponents[j].report_full_on_zero(
                                rounds_left,
                                mask >> j & 1 == 1,
                                own_zero + zeros_elsewhere,
                            )
                        }
                    }
                };
                reports[j + 1] = if full { d } else { 0.0 };
                if full {
                    next_mask |= 1 << j;
                }
            }
            cost_share_into(&reports, c, &mut shares).expect("validated reports");
            expected += prob
                * (shares[0] + v_next[usize::from(own_report_full)][next_mask]);
        }
        expected
    };

    // Backward induction. v_prev starts as V(0, ., .) = 0.
    let mut v_prev = [vec![0.0; masks], vec![0.0; masks]];
    let mut by_state = Vec::with_capacity(t_rounds as usize - 1);
    let mut on_zero = Vec::with_capacity(t_rounds as usize - 1);
    for t in 1..t_rounds {
        let mut v_here = [vec![0.0; masks], vec![0.0; masks]];
        let mut dec_here = [vec![false; masks], vec![false; masks]];
        for own in 0..2 {
            for mask in 0..masks {
                let own_hist = Some(own == 1);
                // The stage cost depends on the report, not the signal, so a
                // busted round costs the same as keeping at D voluntarily.
                let keep_cost = step(true, t, own_hist, Some(mask), &v_prev);
                let lie_cost = step(false, t, own_hist, Some(mask), &v_prev);
                let busted_cost = keep_cost;
                let (choose_full, zero_value) = match forced {
                    Some(pol) => {
                        let zeros = m - mask.count_ones() as usize;
                        let full = pol.report_full_on_zero(t, own == 1, zeros);
                        (full, if full { keep_cost } else { lie_cost })
                    }
                    None => (
                        keep_cost <= lie_cost + COST_TIE_TOLERANCE,
                        keep_cost.min(lie_cost),
                    ),
                };
                v_here[own][mask] = p * busted_cost + q * zero_value;
                dec_here[own][mask] = choose_full;
            }
        }
        by_state.push(v_here.clone());
        on_zero.push(dec_here);
        v_prev = v_here;
    }

    let keep_cost = step(true, t_rounds, None, None, &v_prev);
    let lie_cost = step(false, t_rounds, None, None, &v_prev);
    let busted_cost = keep_cost;
    let (first_on_zero, zero_value) = match forced {
        Some(pol) => {
            let full = pol.first_truthful;
            (full, if full { keep_cost } else { lie_cost })
        }
        None => (
            keep_cost <= lie_cost + COST_TIE_TOLERANCE,
            keep_cost.min(lie_cost),
        ),
    };
    let root = p * busted_cost + q * zero_value;

    Ok(BestResponse {
        value: root,
        policy: BestResponsePolicy {
            first_on_zero,
            on_zero,
        },
        values: BestResponseValues { root, by_state },
    })
}

/// A concrete profitable deviation found by [`check_equilibrium`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationWitness {
    /// Deviating player (always 0: players are symmetric).
    pub player: usize,
    /// Chronological round of the first deviating report.
    pub round_chrono: u32,
    /// The report the deviator files instead of `D`.
    pub deviating_report: f64,
    /// Expected-cost saving of the best response over truthful play.
    pub improvement: f64,
    /// Label of the opponent profile the deviation beats.
    pub opponent_profile: String,
}

/// Outcome of an equilibrium check at a concrete rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub r_tested: f64,
    /// The matching closed-form threshold, for reference.
    pub threshold: f64,
    pub holds: bool,
    pub witness: Option<DeviationWitness>,
}

/// Verifies all-truthful play at the game's rate by brute force: against
/// all-honest opponents (NE), or against every profile in the restricted
/// policy family (DSE). `holds = false` comes with a concrete witness.
pub fn check_equilibrium(game: &MultiPlayerGame, kind: EquilibriumKind) -> Result<EquilibriumReport> {
    let p = game.model().bernoulli_p().ok_or(FluxError::BernoulliRequired {
        context: "check_equilibrium",
    })?;
    let threshold = match kind {
        EquilibriumKind::Ne => ne_threshold(game.t_rounds(), p, game.n(), game.c(), game.d())?,
        EquilibriumKind::Dse => dse_threshold(game.t_rounds(), p, game.n(), game.c(), game.d())?,
    };
    let honest = OpponentPolicy::honest(game.t_rounds(), game.n());
    let profiles: Vec<OpponentPolicy> = match kind {
        EquilibriumKind::Ne => vec![honest.clone()],
        EquilibriumKind::Dse => dse_profile_family(game.t_rounds(), game.n()),
    };
    for profile in &profiles {
        let opponents = vec![profile.clone(); game.n() - 1];
        let truthful = evaluate_policy(game, &honest, &opponents)?;
        let br = best_response(game, &opponents)?;
        let improvement = truthful - br.value;
        if improvement > COST_TIE_TOLERANCE {
            let (round_chrono, deviating_report) =
                first_deviation(&br.policy, game, &opponents);
            return Ok(EquilibriumReport {
                kind,
                r_tested: game.r(),
                threshold,
                holds: false,
                witness: Some(DeviationWitness {
                    player: 0,
                    round_chrono,
                    deviating_report,
                    improvement,
                    opponent_profile: profile.label().to_string(),
                }),
            });
        }
    }
    Ok(EquilibriumReport {
        kind,
        r_tested: game.r(),
        threshold,
        holds: true,
        witness: None,
    })
}

/// First chronological state, reachable while still playing truthfully,
/// where the best response files a zero report.
fn first_deviation(
    policy: &BestResponsePolicy,
    game: &MultiPlayerGame,
    opponents: &[OpponentPolicy],
) -> (u32, f64) {
    if !policy.first_on_zero {
        return (1, 0.0);
    }
    let m = game.n() - 1;
    let masks = 1usize << m;
    // Opponent masks reachable at each depth, given the deviator has kept a
    // full history so far.
    let mut reachable = vec![false; masks];
    for combo in 0..masks {
        let mut mask = 0usize;
        for j in 0..m {
            if combo >> j & 1 == 1 || opponents[j].first_truthful {
                mask |= 1 << j;
            }
        }
        reachable[mask] = true;
    }
    for t in (1..game.t_rounds()).rev() {
        for (mask, &reached) in reachable.clone().iter().enumerate() {
            if !reached {
                continue;
            }
            if !policy.reports_full_on_zero(t, true, mask) {
                return (game.t_rounds() - t + 1, 0.0);
            }
        }
        if t == 1 {
            break;
        }
        let mut next = vec![false; masks];
        for (mask, &reached) in reachable.iter().enumerate() {
            if !reached {
                continue;
            }
            for combo in 0..masks {
                let mut next_mask = 0usize;
                for j in 0..m {
                    let full = combo >> j & 1 == 1 || {
                        let zeros = (0..m).filter(|&k| k != j && mask >> k & 1 == 0).count();
                        opponents[j].report_full_on_zero(t, mask >> j & 1 == 1, zeros)
                    };
                    if full {
                        next_mask |= 1 << j;
                    }
                }
                next[next_mask] = true;
            }
        }
        reachable = next;
    }
    // A strictly better response must deviate somewhere reachable; this
    // fallback is never hit for genuine violations.
    (1, 0.0)
}

/// Bisects the rate at which [`check_equilibrium`] starts to hold.
pub fn bisect_equilibrium_threshold(
    game: &MultiPlayerGame,
    kind: EquilibriumKind,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(FluxError::invalid("tol", format!("must be positive, got {tol}")));
    }
    let holds_at = |r: f64| -> Result<bool> {
        Ok(check_equilibrium(&game.with_rate(r)?, kind)?.holds)
    };
    if holds_at(lo)? {
        return Err(FluxError::NonBracketing {
            lo,
            hi,
            message: "equilibrium already holds at lo".into(),
        });
    }
    if !holds_at(hi)? {
        return Err(FluxError::NonBracketing {
            lo,
            hi,
            message: "equilibrium still fails at hi".into(),
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if holds_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_players(n: usize) -> Result<()> {
    if n < 2 {
        return Err(FluxError::invalid("n", format!("need at least 2 players, got {n}")));
    }
    Ok(())
}

fn check_overhead(n: usize, c: f64, d: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(FluxError::invalid("c", format!("overhead must be positive, got {c}")));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(FluxError::invalid("d", format!("consumption must be positive, got {d}")));
    }
    // The sharing analysis assumes the overhead covers everyone's full
    // consumption; below that floor the closed forms are meaningless.
    let floor = n as f64 * d;
    if c < floor {
        return Err(FluxError::invalid(
            "c",
            format!("must satisfy C >= n*D = {floor}, got {c}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bernoulli_game(n: usize, c: f64, t: u32, r: f64, p: f64) -> MultiPlayerGame {
        MultiPlayerGame::new(n, c, t, r, SignalModel::bernoulli(p, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn cost_share_worked_examples() {
        assert_eq!(cost_share(&[1.0, 1.0, 1.0, 1.0], 4.0).unwrap(), vec![1.0; 4]);
        assert_eq!(cost_share(&[0.0, 0.0], 10.0).unwrap(), vec![5.0, 5.0]);
        assert_eq!(cost_share(&[1.0, 0.0, 1.0], 3.0).unwrap(), vec![1.5, 0.0, 1.5]);
        assert!(cost_share(&[1.0, -0.1], 3.0).is_err());
        assert!(cost_share(&[], 3.0).is_err());
    }

    #[test]
    fn threshold_worked_examples() {
        assert_eq!(dse_threshold(2, 0.5, 2, 2.0, 1.0).unwrap(), 3.0);
        let dse = dse_threshold(10, 2.0 / 3.0, 20, 20.0, 1.0).unwrap();
        assert!((dse - 2.250_076_209_831_15).abs() < 1e-12, "dse {dse}");
        let ne = ne_threshold(10, 2.0 / 3.0, 20, 20.0, 1.0).unwrap();
        assert!((ne - 1.500_050_807_844_731_2).abs() < 1e-12, "ne {ne}");
        assert_eq!(ne_threshold(2, 0.5, 5, 10.0, 1.0).unwrap(), 6.0);
    }

    #[test]
    fn n2_reduction_is_bitwise_exact() {
        for t in 2..8 {
            for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
                for (c, d) in [(2.0, 1.0), (3.0, 1.0), (5.0, 2.0)] {
                    let lhs = ne_threshold(t, p, 2, c, d).unwrap();
                    let rhs = (c / (2.0 * d)) * truthful_threshold(t, p).unwrap();
                    assert_eq!(lhs, rhs, "t={t} p={p} c={c} d={d}");
                }
            }
        }
    }

    #[test]
    fn alpha_threshold_multi_worked_examples() {
        let uniform = SignalModel::uniform(1.0).unwrap();
        let a = AlphaLevel::new(0.5).unwrap();
        let ne = alpha_threshold_multi(EquilibriumKind::Ne, 2, &uniform, a, 2, 2.0, 1.0)
            .unwrap()
            .finite()
            .unwrap();
        assert_eq!(ne, 6.0);
        let dse = alpha_threshold_multi(EquilibriumKind::Dse, 2, &uniform, a, 2, 2.0, 1.0)
            .unwrap()
            .finite()
            .unwrap();
        assert_eq!(dse, 9.0);

        // alpha = 1 on Bernoulli: the plain formulas, DSE exponent n.
        let bern = SignalModel::bernoulli(0.4, 1.0).unwrap();
        let one = AlphaLevel::new(1.0).unwrap();
        let ne = alpha_threshold_multi(EquilibriumKind::Ne, 3, &bern, one, 3, 3.0, 1.0)
            .unwrap()
            .finite()
            .unwrap();
        assert!((ne - ne_threshold(3, 0.4, 3, 3.0, 1.0).unwrap()).abs() < 1e-15);
        let dse = alpha_threshold_multi(EquilibriumKind::Dse, 3, &bern, one, 3, 3.0, 1.0)
            .unwrap()
            .finite()
            .unwrap();
        let expected = ne * (1.0 - 0.6f64.powi(3)) / 0.4;
        assert!((dse - expected).abs() < 1e-12);
    }

    #[test]
    fn delta_ec_bound_worked_examples() {
        assert_eq!(delta_ec_bound(1, 0.5, 2, 2.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(delta_ec_bound(1, 0.5, 2, 2.0, 1.0, 0.0).unwrap(), 0.5);
        assert_eq!(delta_ec_bound(2, 0.5, 2, 2.0, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn best_response_against_honest_matches_the_nash_boundary() {
        let honest = OpponentPolicy::honest(2, 2);
        let opponents = vec![honest.clone()];

        let game = bernoulli_game(2, 2.0, 2, 3.0, 0.5);
        let br = best_response(&game, &opponents).unwrap();
        assert!(br.policy.is_honest_till_end());
        assert!((br.value - 2.0).abs() < 1e-12);

        let game = bernoulli_game(2, 2.0, 2, 2.9, 0.5);
        let br = best_response(&game, &opponents).unwrap();
        assert!(!br.policy.first_report_full());

        let lying = OpponentPolicy::lying_till_end(2, 2);
        let game = bernoulli_game(2, 2.0, 2, 4.0, 0.5);
        let br = best_response(&game, &[lying]).unwrap();
        assert!(br.policy.is_honest_till_end());
    }

    #[test]
    fn truthful_value_against_honest_opponents_is_t_times_share() {
        let game = bernoulli_game(3, 6.0, 4, 2.0, 0.4);
        let honest = OpponentPolicy::honest(4, 3);
        let v = evaluate_policy(&game, &honest, &vec![honest.clone(); 2]).unwrap();
        assert!((v - 4.0 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn check_equilibrium_worked_examples() {
        let report = check_equilibrium(&bernoulli_game(2, 2.0, 2, 3.0, 0.5), EquilibriumKind::Ne)
            .unwrap();
        assert!(report.holds);
        assert_eq!(report.threshold, 3.0);
        assert!(report.witness.is_none());

        let report = check_equilibrium(&bernoulli_game(2, 2.0, 2, 2.9, 0.5), EquilibriumKind::Ne)
            .unwrap();
        assert!(!report.holds);
        let witness = report.witness.unwrap();
        assert_eq!(witness.round_chrono, 1);
        assert_eq!(witness.deviating_report, 0.0);
        assert!(witness.improvement > COST_TIE_TOLERANCE);

        let report = check_equilibrium(&bernoulli_game(2, 2.0, 2, 3.0, 0.5), EquilibriumKind::Dse)
            .unwrap();
        assert!(report.holds, "witness: {:?}", report.witness);
    }

    #[test]
    fn equilibrium_bisection_recovers_the_closed_forms() {
        let game = bernoulli_game(2, 2.0, 3, 1.0, 0.5);
        let ne = bisect_equilibrium_threshold(&game, EquilibriumKind::Ne, 0.0, 12.0, 1e-4)
            .unwrap();
        assert!((ne - ne_threshold(3, 0.5, 2, 2.0, 1.0).unwrap()).abs() < 1e-3);
        let dse = bisect_equilibrium_threshold(&game, EquilibriumKind::Dse, 0.0, 12.0, 1e-4)
            .unwrap();
        assert!((dse - dse_threshold(3, 0.5, 2, 2.0, 1.0).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn delta_ec_brute_is_monotone_in_zeros_for_an_in_regime_rate() {
        // n=3, T=3, p=0.5: pick a rate where the best response maintains a
        // full history at every opponent state and keeps lying on a zero
        // history (the regime of the monotonicity claim). Rates below ~1.5
        // leave it: maintaining stops paying once opponents hold zero
        // histories, because the lone full report absorbs the whole share.
        let game = bernoulli_game(3, 3.0, 3, 2.0, 0.5);
        let opponents = vec![OpponentPolicy::lying_till_busted(3, 3); 2];
        let br = best_response(&game, &opponents).unwrap();
        let in_regime = (1..3).all(|t| {
            (0..4).all(|mask| {
                br.policy.reports_full_on_zero(t, true, mask)
                    && !br.policy.reports_full_on_zero(t, false, mask)
            })
        });
        assert!(in_regime, "rate 2.0 left the claimed regime");
        for t in 1..3 {
            let both_full = delta_ec_brute(&game, &opponents, t, 0b11).unwrap();
            let one_zero = delta_ec_brute(&game, &opponents, t, 0b01).unwrap();
            let all_zero = delta_ec_brute(&game, &opponents, t, 0b00).unwrap();
            assert!(one_zero >= both_full - 1e-12, "t={t}");
            assert!(all_zero >= one_zero - 1e-12, "t={t}");
        }
    }

    #[test]
    fn delta_ec_brute_respects_the_closed_form_bound() {
        let game = bernoulli_game(2, 2.0, 3, 1.2, 0.5);
        let opponents = vec![OpponentPolicy::lying_till_busted(3, 2)];
        for t in 1..3 {
            let brute = delta_ec_brute(&game, &opponents, t, 0b0).unwrap();
            let bound = delta_ec_bound(t, 0.5, 2, 2.0, 1.0, 1.2).unwrap();
            assert!(brute <= bound + 1e-12, "t={t}: {brute} > {bound}");
        }
    }

    #[test]
    fn state_cap_rejects_oversized_joint_state_spaces() {
        let game = bernoulli_game(3, 3.0, 3, 1.0, 0.5);
        let opponents = vec![OpponentPolicy::honest(3, 3); 2];
        let err = best_response_capped(&game, &opponents, 16).unwrap_err();
        assert!(matches!(err, FluxError::StateCapExceeded { .. }));
    }

    #[test]
    fn game_construction_enforces_the_overhead_floor() {
        let model = SignalModel::bernoulli(0.5, 1.0).unwrap();
        let err = MultiPlayerGame::new(3, 2.5, 2, 1.0, model).unwrap_err();
        match err {
            FluxError::InvalidParameter { field, message } => {
                assert_eq!(field, "c");
                assert!(message.contains("C >= n*D"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn group_history_counts_zeros_excluding_self() {
        let h = GroupHistory {
            prior: vec![Some(0.0), Some(1.0), Some(0.0), None],
        };
        assert_eq!(h.zeros_excluding(0), 1);
        assert_eq!(h.zeros_excluding(1), 2);
    }

    proptest! {
        #[test]
        fn cost_share_sums_to_c_exactly(
            reports in proptest::collection::vec(0.0f64..=1.0, 1..8),
            c in 0.5f64..=40.0,
        ) {
            let shares = cost_share(&reports, c).unwrap();
            let total: f64 = shares.iter().sum();
            prop_assert_eq!(total, c);
            for (share, &report) in shares.iter().zip(&reports) {
                prop_assert!(*share >= 0.0);
                if report == 0.0 && reports.iter().any(|&b| b > 0.0) {
                    prop_assert_eq!(*share, 0.0);
                }
            }
        }

        #[test]
        fn cost_share_is_proportional_up_to_rounding(
            reports in proptest::collection::vec(0.01f64..=1.0, 2..6),
            c in 0.5f64..=40.0,
        ) {
            let shares = cost_share(&reports, c).unwrap();
            let sum: f64 = reports.iter().sum();
            for (share, &report) in shares.iter().zip(&reports) {
                let exact = c * report / sum;
                prop_assert!((share - exact).abs() <= 1e-9 * c);
            }
        }

        #[test]
        fn dse_dominates_ne(
            t in 2u32..30,
            p in 0.05f64..=0.95,
            n in 2usize..12,
            scale in 1.0f64..=3.0,
        ) {
            let d = 1.0;
            let c = scale * n as f64 * d;
            let ne = ne_threshold(t, p, n, c, d).unwrap();
            let dse = dse_threshold(t, p, n, c, d).unwrap();
            prop_assert!(dse >= ne - 1e-12);
            let next_ne = ne_threshold(t + 1, p, n, c, d).unwrap();
            let next_dse = dse_threshold(t + 1, p, n, c, d).unwrap();
            prop_assert!(next_ne <= ne);
            prop_assert!(next_dse <= dse);
            // Strict decrease is representable only while the gap to the
            // T -> infinity limit dominates rounding.
            let scale_factor = c / (n as f64 * d);
            if ne - scale_factor / p > 1e-12 * scale_factor / p {
                prop_assert!(next_ne < ne);
                prop_assert!(next_dse < dse);
            }
        }
    }
}
