//! Seeded Monte Carlo execution of single- and multi-player games, with
//! trace auditing.
//!
//! Traces record rounds chronologically but carry an explicit rounds-left
//! column, because everything analytical in this crate counts rounds
//! remaining and off-by-one confusion between the two conventions is the
//! dominant bug risk. Every trial draws from its own stream derived from
//! (master seed, trial index), so results never depend on execution order;
//! aggregation uses pairwise summation for the same reason.

use crate::error::{FluxError, Result};
use crate::format::sig9;
use crate::multi::{cost_share, MultiPlayerGame, OpponentPolicy};
use crate::oracle::Policy;
use crate::single::{History, SinglePlayerGame, StrategyClass};
use crate::stream::{derive_rng, StreamPurpose};

/// A reporting rule for the single-player game, as the simulator sees it:
/// `history` is `None` exactly in the chronological first round.
pub trait SingleReportPolicy {
    fn report(&self, rounds_left: u32, history: Option<f64>, signal: f64) -> Result<f64>;
    fn label(&self) -> String;
}

/// A reporting rule for one player of the group game. `zeros_among_others`
/// counts zero prior reports among the other `n-1` players (ignored in the
/// first round).
pub trait MultiReportPolicy {
    fn report(
        &self,
        rounds_left: u32,
        own_history: Option<f64>,
        signal: f64,
        zeros_among_others: usize,
        d: f64,
    ) -> Result<f64>;
    fn label(&self) -> String;
}

/// Plays a named strategy class over Bernoulli signals: any positive signal
/// is a bust and forces a full report.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReportPolicy {
    class: StrategyClass,
    t_rounds: u32,
    d: f64,
}

impl ClassReportPolicy {
    pub fn new(class: StrategyClass, t_rounds: u32, d: f64) -> Self {
        ClassReportPolicy { class, t_rounds, d }
    }

    pub fn class(&self) -> StrategyClass {
        self.class
    }
}

impl SingleReportPolicy for ClassReportPolicy {
    fn report(&self, rounds_left: u32, history: Option<f64>, signal: f64) -> Result<f64> {
        if signal > 0.0 {
            return Ok(self.d.max(signal));
        }
        let full = match self.class {
            StrategyClass::HonestTillEnd => true,
            StrategyClass::LyingTillEnd => false,
            StrategyClass::LyingTillBusted => matches!(history, Some(h) if h > 0.0),
            StrategyClass::LyingTillBustedPlusLieLastRound => {
                rounds_left > 1 && matches!(history, Some(h) if h > 0.0)
            }
            StrategyClass::MixedLieFirst { lie_rounds } => {
                rounds_left <= self.t_rounds - lie_rounds
            }
        };
        Ok(if full { self.d } else { 0.0 })
    }

    fn label(&self) -> String {
        self.class.to_string()
    }
}

/// A solved backward-induction policy used directly as a simulation policy.
impl SingleReportPolicy for Policy {
    fn report(&self, rounds_left: u32, history: Option<f64>, signal: f64) -> Result<f64> {
        let history = match history {
            None => History::None,
            Some(h) => History::Prior(h),
        };
        self.report_for(rounds_left, history, signal)
    }

    fn label(&self) -> String {
        "solved-optimal".to_string()
    }
}

impl MultiReportPolicy for OpponentPolicy {
    fn report(
        &self,
        rounds_left: u32,
        own_history: Option<f64>,
        signal: f64,
        zeros_among_others: usize,
        d: f64,
    ) -> Result<f64> {
        Ok(OpponentPolicy::report(
            self,
            rounds_left,
            own_history,
            signal,
            zeros_among_others,
            d,
        ))
    }

    fn label(&self) -> String {
        OpponentPolicy::label(self).to_string()
    }
}

/// One player-round of a trace, in chronological order.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round_chrono: u32,
    pub rounds_left: u32,
    pub player: usize,
    pub signal: f64,
    pub report: f64,
    pub regular_payment: f64,
    pub penalty_payment: f64,
}

/// The game parameters a trace carries so it can be audited standalone.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceParams {
    Single { t_rounds: u32, r: f64, d: f64, model: String },
    Multi { n: usize, c: f64, t_rounds: u32, r: f64, d: f64, model: String },
}

impl TraceParams {
    pub fn t_rounds(&self) -> u32 {
        match *self {
            TraceParams::Single { t_rounds, .. } | TraceParams::Multi { t_rounds, .. } => t_rounds,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            TraceParams::Single { .. } => 1,
            TraceParams::Multi { n, .. } => n,
        }
    }

    pub fn r(&self) -> f64 {
        match *self {
            TraceParams::Single { r, .. } | TraceParams::Multi { r, .. } => r,
        }
    }
}

/// A full playout: every player-round with its payments, plus the seed and
/// parameters needed to recompute them.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTrace {
    pub params: TraceParams,
    pub seed: u64,
    pub records: Vec<RoundRecord>,
}

impl GameTrace {
    /// Total cost (regular + penalty) paid by `player` over the game.
    pub fn total_cost(&self, player: usize) -> f64 {
        self.records
            .iter()
            .filter(|rec| rec.player == player)
            .map(|rec| rec.regular_payment + rec.penalty_payment)
            .sum()
    }

    /// CSV serialization: seed and parameters in a leading comment block,
    /// then one row per player-round in chronological order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# flux game trace\n");
        match &self.params {
            TraceParams::Single { t_rounds, r, d, model } => {
                out.push_str("# kind: single\n");
                out.push_str(&format!("# t_rounds: {t_rounds}, r: {r}, d: {d}\n"));
                out.push_str(&format!("# model: {model}\n"));
            }
            TraceParams::Multi { n, c, t_rounds, r, d, model } => {
                out.push_str("# kind: multi\n");
                out.push_str(&format!(
                    "# n: {n}, c: {c}, t_rounds: {t_rounds}, r: {r}, d: {d}\n"
                ));
                out.push_str(&format!("# model: {model}\n"));
            }
        }
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(
            "round_chrono,rounds_left,player,signal,report,regular_payment,penalty_payment\n",
        );
        for rec in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                rec.round_chrono,
                rec.rounds_left,
                rec.player,
                sig9(rec.signal),
                sig9(rec.report),
                sig9(rec.regular_payment),
                sig9(rec.penalty_payment),
            ));
        }
        out
    }
}

/// Mean cost per player with its standard error (sample stddev / sqrt of
/// trials) over independent seeded trials.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSummary {
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// Plays one single-player game under `policy` on the stream derived from
/// `seed`.
pub fn run_single_game<P>(game: &SinglePlayerGame, policy: &P, seed: u64) -> Result<GameTrace>
where
    P: SingleReportPolicy + ?Sized,
{
    let mut rng = derive_rng(seed, StreamPurpose::GameRun, 0);
    let t_rounds = game.t_rounds();
    let mut records = Vec::with_capacity(t_rounds as usize);
    let mut history: Option<f64> = None;
    for chrono in 1..=t_rounds {
        let rounds_left = t_rounds - chrono + 1;
        let signal = game.model().sample(&mut rng).value;
        let report = policy.report(rounds_left, history, signal)?;
        check_report(report, signal, chrono, 0)?;
        let penalty = history.map_or(0.0, |h| game.r() * (report - h).abs());
        records.push(RoundRecord {
            round_chrono: chrono,
            rounds_left,
            player: 0,
            signal,
            report,
            regular_payment: report,
            penalty_payment: penalty,
        });
        history = Some(report);
    }
    Ok(GameTrace {
        params: TraceParams::Single {
            t_rounds,
            r: game.r(),
            d: game.d(),
            model: game.model().describe(),
        },
        seed,
        records,
    })
}

/// Plays one group game, one policy per player. Signals are drawn
/// round-major, player-minor from a single derived stream.
pub fn run_multi_game(
    game: &MultiPlayerGame,
    policies: &[&dyn MultiReportPolicy],
    seed: u64,
) -> Result<GameTrace> {
    let n = game.n();
    if policies.len() != n {
        return Err(FluxError::invalid(
            "policies",
            format!("need one policy per player ({n}), got {}", policies.len()),
        ));
    }
    let mut rng = derive_rng(seed, StreamPurpose::GameRun, 0);
    let t_rounds = game.t_rounds();
    let d = game.d();
    let mut records = Vec::with_capacity(t_rounds as usize * n);
    let mut histories: Vec<Option<f64>> = vec![None; n];
    let mut reports = vec![0.0; n];
    for chrono in 1..=t_rounds {
        let rounds_left = t_rounds - chrono + 1;
        let signals: Vec<f64> = (0..n).map(|_| game.model().sample(&mut rng).value).collect();
        for i in 0..n {
            let zeros = histories
                .iter()
                .enumerate()
                .filter(|&(j, h)| j != i && *h == Some(0.0))
                .count();
            reports[i] = policies[i].report(rounds_left, histories[i], signals[i], zeros, d)?;
            check_report(reports[i], signals[i], chrono, i)?;
        }
        let shares = cost_share(&reports, game.c())?;
        for i in 0..n {
            let penalty = histories[i].map_or(0.0, |h| game.r() * (reports[i] - h).abs());
            records.push(RoundRecord {
                round_chrono: chrono,
                rounds_left,
                player: i,
                signal: signals[i],
                report: reports[i],
                regular_payment: shares[i],
                penalty_payment: penalty,
            });
        }
        for i in 0..n {
            histories[i] = Some(reports[i]);
        }
    }
    Ok(GameTrace {
        params: TraceParams::Multi {
            n,
            c: game.c(),
            t_rounds,
            r: game.r(),
            d,
            model: game.model().describe(),
        },
        seed,
        records,
    })
}

fn check_report(report: f64, signal: f64, chrono: u32, player: usize) -> Result<()> {
    if report < signal - 1e-12 {
        return Err(FluxError::ReportBelowSignal {
            round: chrono,
            player,
            report,
            signal,
        });
    }
    Ok(())
}

/// Total cost of one single-player trial without building a trace.
fn trial_cost_single<P>(game: &SinglePlayerGame, policy: &P, seed: u64, index: u64) -> Result<f64>
where
    P: SingleReportPolicy + ?Sized,
{
    let mut rng = derive_rng(seed, StreamPurpose::Trial, index);
    let t_rounds = game.t_rounds();
    let mut history: Option<f64> = None;
    let mut total = 0.0;
    for chrono in 1..=t_rounds {
        let rounds_left = t_rounds - chrono + 1;
        let signal = game.model().sample(&mut rng).value;
        let report = policy.report(rounds_left, history, signal)?;
        check_report(report, signal, chrono, 0)?;
        total += report + history.map_or(0.0, |h| game.r() * (report - h).abs());
        history = Some(report);
    }
    Ok(total)
}

/// Per-player total costs of one group trial without building a trace.
fn trial_cost_multi(
    game: &MultiPlayerGame,
    policies: &[&dyn MultiReportPolicy],
    seed: u64,
    index: u64,
    totals: &mut [f64],
    reports: &mut Vec<f64>,
    shares: &mut Vec<f64>,
) -> Result<()> {
    let n = game.n();
    let mut rng = derive_rng(seed, StreamPurpose::Trial, index);
    let t_rounds = game.t_rounds();
    let d = game.d();
    totals.fill(0.0);
    let mut histories: Vec<Option<f64>> = vec![None; n];
    let mut signals = vec![0.0; n];
    reports.resize(n, 0.0);
    for chrono in 1..=t_rounds {
        let rounds_left = t_rounds - chrono + 1;
        for slot in signals.iter_mut() {
            *slot = game.model().sample(&mut rng).value;
        }
        for i in 0..n {
            let zeros = histories
                .iter()
                .enumerate()
                .filter(|&(j, h)| j != i && *h == Some(0.0))
                .count();
            reports[i] = policies[i].report(rounds_left, histories[i], signals[i], zeros, d)?;
            check_report(reports[i], signals[i], chrono, i)?;
        }
        crate::multi::cost_share_into(reports, game.c(), shares)?;
        for i in 0..n {
            totals[i] +=
                shares[i] + histories[i].map_or(0.0, |h| game.r() * (reports[i] - h).abs());
            histories[i] = Some(reports[i]);
        }
    }
    Ok(())
}

/// Mean and standard error of the single-player total cost over `trials`
/// independent streams.
pub fn monte_carlo_single<P>(
    game: &SinglePlayerGame,
    policy: &P,
    trials: u64,
    seed: u64,
) -> Result<CostSummary>
where
    P: SingleReportPolicy + ?Sized,
{
    check_trials(trials)?;
    let mut totals = vec![0.0; trials as usize];
    for (index, slot) in totals.iter_mut().enumerate() {
        *slot = trial_cost_single(game, policy, seed, index as u64)?;
    }
    Ok(summarize(&[totals], trials, seed))
}

/// Mean and standard error per player of the group total cost over `trials`
/// independent streams.
pub fn monte_carlo_multi(
    game: &MultiPlayerGame,
    policies: &[&dyn MultiReportPolicy],
    trials: u64,
    seed: u64,
) -> Result<CostSummary> {
    check_trials(trials)?;
    let n = game.n();
    if policies.len() != n {
        return Err(FluxError::invalid(
            "policies",
            format!("need one policy per player ({n}), got {}", policies.len()),
        ));
    }
    let mut per_player: Vec<Vec<f64>> = vec![vec![0.0; trials as usize]; n];
    let mut totals = vec![0.0; n];
    let mut reports = Vec::with_capacity(n);
    let mut shares = Vec::with_capacity(n);
    for index in 0..trials {
        trial_cost_multi(game, policies, seed, index, &mut totals, &mut reports, &mut shares)?;
        for (player, &total) in totals.iter().enumerate() {
            per_player[player][index as usize] = total;
        }
    }
    Ok(summarize(&per_player, trials, seed))
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < 1 {
        return Err(FluxError::invalid("trials", "need at least one trial"));
    }
    Ok(())
}

/// Order-independent aggregation: trial totals live in indexed slots, and
/// the fixed pairwise-summation tree gives the same bits no matter how the
/// slots were filled.
fn summarize(per_player: &[Vec<f64>], trials: u64, seed: u64) -> CostSummary {
    let mut mean = Vec::with_capacity(per_player.len());
    let mut std_error = Vec::with_capacity(per_player.len());
    for totals in per_player {
        let m = pairwise_sum(totals) / trials as f64;
        let se = if trials > 1 {
            let devs: Vec<f64> = totals.iter().map(|&x| (x - m) * (x - m)).collect();
            let var = pairwise_sum(&devs) / (trials - 1) as f64;
            (var / trials as f64).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        std_error.push(se);
    }
    CostSummary {
        mean,
        std_error,
        trials,
        seed,
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Outcome of auditing a trace against its own parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceVerdict {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

/// Recomputes every payment in the trace from its reports and parameters
/// and checks the structural invariants. Returns all violations found.
pub fn verify_trace(trace: &GameTrace) -> TraceVerdict {
    const TOL: f64 = 1e-12;
    let mut diagnostics = Vec::new();
    let t_rounds = trace.params.t_rounds();
    let n = trace.params.n();
    let r = trace.params.r();

    if trace.records.len() != t_rounds as usize * n {
        diagnostics.push(format!(
            "expected {} records ({} rounds x {} players), found {}",
            t_rounds as usize * n,
            t_rounds,
            n,
            trace.records.len()
        ));
        return TraceVerdict { ok: false, diagnostics };
    }

    let mut histories: Vec<Option<f64>> = vec![None; n];
    for chrono in 1..=t_rounds {
        let base = (chrono as usize - 1) * n;
        let round = &trace.records[base..base + n];
        let mut reports = Vec::with_capacity(n);
        for (i, rec) in round.iter().enumerate() {
            if rec.round_chrono != chrono || rec.player != i {
                diagnostics.push(format!(
                    "round {chrono} player {i}: out-of-order record (found round {} player {})",
                    rec.round_chrono, rec.player
                ));
            }
            if rec.rounds_left != t_rounds - chrono + 1 {
                diagnostics.push(format!(
                    "round {chrono} player {i}: rounds_left {} disagrees with horizon",
                    rec.rounds_left
                ));
            }
            if rec.report < rec.signal - TOL {
                diagnostics.push(format!(
                    "round {chrono} player {i}: report {} below signal {}",
                    rec.report, rec.signal
                ));
            }
            reports.push(rec.report);
        }
        let expected_regular: Vec<f64> = match &trace.params {
            TraceParams::Single { .. } => reports.clone(),
            TraceParams::Multi { c, .. } => match cost_share(&reports, *c) {
                Ok(shares) => shares,
                Err(err) => {
                    diagnostics.push(format!("round {chrono}: cost share failed: {err}"));
                    continue;
                }
            },
        };
        for (i, rec) in round.iter().enumerate() {
            if (rec.regular_payment - expected_regular[i]).abs() > TOL {
                diagnostics.push(format!(
                    "round {chrono} player {i}: regular payment {} should be {}",
                    rec.regular_payment, expected_regular[i]
                ));
            }
            let expected_penalty = histories[i].map_or(0.0, |h| r * (rec.report - h).abs());
            if (rec.penalty_payment - expected_penalty).abs() > TOL {
                diagnostics.push(format!(
                    "round {chrono} player {i}: penalty {} should be {}",
                    rec.penalty_payment, expected_penalty
                ));
            }
            histories[i] = Some(rec.report);
        }
    }
    TraceVerdict {
        ok: diagnostics.is_empty(),
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi::{best_response, MultiPlayerGame};
    use crate::oracle::{solve_single, ReportGrid, SolveResult};
    use crate::signal::SignalModel;
    use crate::single::SinglePlayerGame;

    fn single_game(t: u32, p: f64, r: f64) -> SinglePlayerGame {
        SinglePlayerGame::new(t, r, SignalModel::bernoulli(p, 1.0).unwrap()).unwrap()
    }

    fn solve(game: &SinglePlayerGame) -> SolveResult {
        solve_single(game, &ReportGrid::bernoulli(game.d()).unwrap()).unwrap()
    }

    #[test]
    fn honest_single_trace_costs_exactly_t_times_d() {
        let game = single_game(5, 0.5, 2.0);
        let policy = ClassReportPolicy::new(StrategyClass::HonestTillEnd, 5, 1.0);
        let trace = run_single_game(&game, &policy, 42).unwrap();
        assert_eq!(trace.total_cost(0), 5.0);
        assert!(trace.records.iter().all(|rec| rec.penalty_payment == 0.0));
        assert!(verify_trace(&trace).ok);
    }

    #[test]
    fn same_seed_gives_identical_traces() {
        let game = single_game(4, 0.3, 1.5);
        let policy = ClassReportPolicy::new(StrategyClass::LyingTillBusted, 4, 1.0);
        let a = run_single_game(&game, &policy, 7).unwrap();
        let b = run_single_game(&game, &policy, 7).unwrap();
        assert_eq!(a, b);
        let c = run_single_game(&game, &policy, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn lying_till_end_per_trace_support_and_mean() {
        // T=2, p=0.5, r=0.5: playing the signal gives per-trace costs
        // 0 (never busted), 1.5 (busted once), 2 (busted twice); the
        // expectation is 1.25, which equals the optimal value since r < 1.
        let game = single_game(2, 0.5, 0.5);
        let policy = ClassReportPolicy::new(StrategyClass::LyingTillEnd, 2, 1.0);
        let solved = solve(&game);
        assert!((solved.values.root_value() - 1.25).abs() < 1e-12);
        for seed in 0..50 {
            let trace = run_single_game(&game, &policy, seed).unwrap();
            let cost = trace.total_cost(0);
            assert!(
                [0.0, 1.5, 2.0].iter().any(|&x| (cost - x).abs() < 1e-12),
                "unexpected per-trace cost {cost}"
            );
            assert!(verify_trace(&trace).ok);
        }
        let summary = monte_carlo_single(&game, &policy, 100_000, 11).unwrap();
        assert!((summary.mean[0] - 1.25).abs() <= 4.0 * summary.std_error[0]);
    }

    #[test]
    fn lying_till_busted_mean_matches_the_solved_value() {
        let game = single_game(2, 0.5, 2.0);
        let policy = ClassReportPolicy::new(StrategyClass::LyingTillBusted, 2, 1.0);
        let summary = monte_carlo_single(&game, &policy, 100_000, 3).unwrap();
        assert!(
            (summary.mean[0] - 1.75).abs() <= 4.0 * summary.std_error[0],
            "mean {} se {}",
            summary.mean[0],
            summary.std_error[0]
        );
    }

    #[test]
    fn honest_monte_carlo_is_exact_with_zero_error() {
        for d in [1.0, 0.25] {
            let game = SinglePlayerGame::new(
                3,
                1.0,
                SignalModel::bernoulli(0.4, d).unwrap(),
            )
            .unwrap();
            let policy = ClassReportPolicy::new(StrategyClass::HonestTillEnd, 3, d);
            let summary = monte_carlo_single(&game, &policy, 10_000, 5).unwrap();
            assert_eq!(summary.mean[0], 3.0 * d);
            assert_eq!(summary.std_error[0], 0.0);
        }
    }

    #[test]
    fn multi_all_truthful_with_tight_overhead_is_exact() {
        let model = SignalModel::bernoulli(0.5, 1.0).unwrap();
        let game = MultiPlayerGame::new(3, 3.0, 4, 2.0, model).unwrap();
        let honest = OpponentPolicy::honest(4, 3);
        let policies: Vec<&dyn MultiReportPolicy> = vec![&honest, &honest, &honest];
        let summary = monte_carlo_multi(&game, &policies, 2_000, 9).unwrap();
        for player in 0..3 {
            assert_eq!(summary.mean[player], 4.0);
            assert_eq!(summary.std_error[player], 0.0);
        }
        let trace = run_multi_game(&game, &policies, 17).unwrap();
        assert!(verify_trace(&trace).ok);
        for player in 0..3 {
            assert_eq!(trace.total_cost(player), 4.0);
        }
    }

    #[test]
    fn solved_policy_runs_as_a_simulation_policy() {
        let game = single_game(3, 0.5, 1.2);
        let solved = solve(&game);
        let summary = monte_carlo_single(&game, &solved.policy, 100_000, 21).unwrap();
        assert!(
            (summary.mean[0] - solved.values.root_value()).abs()
                <= 4.0 * summary.std_error[0].max(1e-9),
            "mean {} vs value {}",
            summary.mean[0],
            solved.values.root_value()
        );
    }

    #[test]
    fn perturbed_penalty_is_caught_and_names_the_round() {
        let game = single_game(4, 0.5, 1.5);
        let policy = ClassReportPolicy::new(StrategyClass::LyingTillBusted, 4, 1.0);
        // Find a seed whose trace has a nonzero penalty to perturb.
        let mut trace = (0..100)
            .map(|seed| run_single_game(&game, &policy, seed).unwrap())
            .find(|trace| trace.records.iter().any(|rec| rec.penalty_payment > 0.0))
            .expect("some trace has a penalty");
        let idx = trace
            .records
            .iter()
            .position(|rec| rec.penalty_payment > 0.0)
            .unwrap();
        let round = trace.records[idx].round_chrono;
        trace.records[idx].penalty_payment += 1e-6;
        let verdict = verify_trace(&trace);
        assert!(!verdict.ok);
        assert!(
            verdict
                .diagnostics
                .iter()
                .any(|d| d.contains(&format!("round {round}")) && d.contains("penalty")),
            "diagnostics: {:?}",
            verdict.diagnostics
        );
    }

    #[test]
    fn report_below_signal_is_caught() {
        let game = single_game(2, 0.5, 1.0);
        let policy = ClassReportPolicy::new(StrategyClass::HonestTillEnd, 2, 1.0);
        let mut trace = run_single_game(&game, &policy, 1).unwrap();
        trace.records[1].report = trace.records[1].signal - 0.5;
        let verdict = verify_trace(&trace);
        assert!(!verdict.ok);
        assert!(verdict
            .diagnostics
            .iter()
            .any(|d| d.contains("below signal")));
    }

    #[test]
    fn trial_slots_make_aggregation_order_independent() {
        let game = single_game(3, 0.4, 1.0);
        let policy = ClassReportPolicy::new(StrategyClass::LyingTillBusted, 3, 1.0);
        let trials = 1000u64;
        let forward = monte_carlo_single(&game, &policy, trials, 13).unwrap();
        let mut totals = vec![0.0; trials as usize];
        for index in (0..trials).rev() {
            totals[index as usize] = trial_cost_single(&game, &policy, 13, index).unwrap();
        }
        let reversed = summarize(&[totals], trials, 13);
        assert_eq!(forward, reversed);
    }

    #[test]
    fn csv_layout_is_stable_and_commented() {
        let game = single_game(2, 0.5, 1.0);
        let policy = ClassReportPolicy::new(StrategyClass::HonestTillEnd, 2, 1.0);
        let trace = run_single_game(&game, &policy, 2).unwrap();
        let csv = trace.to_csv();
        assert!(csv.starts_with("# flux game trace\n"));
        assert!(csv.contains("# seed: 2\n"));
        assert!(csv.contains(
            "round_chrono,rounds_left,player,signal,report,regular_payment,penalty_payment\n"
        ));
        // 5 comment lines, 1 header, one row per round.
        assert_eq!(csv.lines().count(), 5 + 1 + 2);
        let run_again = run_single_game(&game, &policy, 2).unwrap().to_csv();
        assert_eq!(csv, run_again);
    }

    #[test]
    fn monte_carlo_mean_tracks_best_response_value_in_the_group_game() {
        let model = SignalModel::bernoulli(0.5, 1.0).unwrap();
        let game = MultiPlayerGame::new(2, 2.0, 3, 0.8, model).unwrap();
        let lying = OpponentPolicy::lying_till_busted(3, 2);
        let br = best_response(&game, std::slice::from_ref(&lying)).unwrap();
        // Simulate the lying-till-busted pair and compare player 1's mean
        // against the forced-policy evaluation of the same profile.
        let policies: Vec<&dyn MultiReportPolicy> = vec![&lying, &lying];
        let summary = monte_carlo_multi(&game, &policies, 100_000, 23).unwrap();
        let forced =
            crate::multi::evaluate_policy(&game, &lying, std::slice::from_ref(&lying)).unwrap();
        assert!(
            (summary.mean[0] - forced).abs() <= 4.0 * summary.std_error[0],
            "mean {} vs forced {}",
            summary.mean[0],
            forced
        );
        assert!(br.value <= forced + 1e-12);
    }
}
