//! Backward-induction solver over discrete report grids.
//!
//! Independent ground truth for every closed form in [`crate::single`]: the
//! recursion knows nothing about thresholds or strategy classes, it just
//! minimizes expected cost state by state. States are `(rounds_left,
//! prior_report)` pairs plus the no-history root; the value of a state is
//!
//! ```text
//! V(t, h) = E_y [ min over grid b >= y of  b + r*|b - h| + V(t-1, b) ]
//! ```
//!
//! with `V(0, _) = 0` and no penalty term in the chronologically first
//! round. The report is chosen after seeing the signal. Ties within
//! [`crate::COST_TIE_TOLERANCE`] resolve to the larger report, matching the
//! classifier's convention.

use crate::error::{FluxError, Result};
use crate::single::{History, SinglePlayerGame, StrategyClass};
use crate::COST_TIE_TOLERANCE;

/// Default cap on `root + (T-1) * grid` DP states.
pub const DEFAULT_STATE_CAP: u64 = 10_000_000;

/// Sorted report levels in `[0, D]`, always containing 0 and `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportGrid {
    levels: Vec<f64>,
    d: f64,
}

impl ReportGrid {
    /// A grid from explicit levels; they are sorted and must be distinct,
    /// within `[0, d]`, and include both endpoints.
    pub fn new(mut levels: Vec<f64>, d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(FluxError::invalid("d", format!("must be positive, got {d}")));
        }
        levels.sort_by(f64::total_cmp);
        if levels.windows(2).any(|w| w[0] == w[1]) {
            return Err(FluxError::invalid("levels", "duplicate report levels"));
        }
        if levels.first() != Some(&0.0) || levels.last() != Some(&d) {
            return Err(FluxError::invalid(
                "levels",
                format!("grid must span [0, {d}] including both endpoints"),
            ));
        }
        Ok(ReportGrid { levels, d })
    }

    /// The two-level grid `{0, d}` that is optimal for Bernoulli signals.
    pub fn bernoulli(d: f64) -> Result<Self> {
        ReportGrid::new(vec![0.0, d], d)
    }

    /// A grid holding exactly the model's finite support (plus endpoints).
    pub fn covering(model: &crate::signal::SignalModel) -> Result<Self> {
        let mut levels = model.support().ok_or_else(|| FluxError::GridMismatch {
            message: "continuous signal support; discretize the model first".into(),
        })?;
        if levels.first() != Some(&0.0) {
            levels.insert(0, 0.0);
        }
        if levels.last() != Some(&model.d()) {
            levels.push(model.d());
        }
        ReportGrid::new(levels, model.d())
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Index of `value` on the grid, tolerating float noise up to
    /// `1e-12 * max(1, |value|)`.
    pub fn index_of(&self, value: f64) -> Option<usize> {
        let tol = 1e-12 * value.abs().max(1.0);
        self.levels.iter().position(|&l| (l - value).abs() <= tol)
    }
}

/// Optimal decision table: the report for every `(rounds_left, history,
/// signal)` state of the discretized game.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    t_rounds: u32,
    grid: ReportGrid,
    /// Grid indices of the signal support, ascending.
    support: Vec<usize>,
    /// `first[s]` = report index in the no-history root for support
    /// position `s`.
    first: Vec<usize>,
    /// `later[t-1][h][s]` = report index at `rounds_left = t < T`, history
    /// grid index `h`, support position `s`.
    later: Vec<Vec<Vec<usize>>>,
}

impl Policy {
    pub fn t_rounds(&self) -> u32 {
        self.t_rounds
    }

    pub fn grid(&self) -> &ReportGrid {
        &self.grid
    }

    /// Signal values the policy is defined on.
    pub fn signal_levels(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.grid.levels()[i]).collect()
    }

    /// The report for a state, by value. `history` must be `None` exactly
    /// in the first round (`rounds_left = t_rounds`).
    pub fn report_for(&self, rounds_left: u32, history: History, signal: f64) -> Result<f64> {
        let spos = self
            .support
            .iter()
            .position(|&i| self.grid.index_of(signal) == Some(i))
            .ok_or_else(|| FluxError::GridMismatch {
                message: format!("signal {signal} is not on the policy's support"),
            })?;
        let idx = match (rounds_left == self.t_rounds, history) {
            (true, History::None) => self.first[spos],
            (false, History::Prior(b)) => {
                let h = self.grid.index_of(b).ok_or_else(|| FluxError::GridMismatch {
                    message: format!("history {b} is not on the report grid"),
                })?;
                self.later[rounds_left as usize - 1][h][spos]
            }
            _ => {
                return Err(FluxError::invalid(
                    "history",
                    "no-history states exist only in the first round",
                ))
            }
        };
        Ok(self.grid.levels()[idx])
    }

    /// Whether two policies make identical decisions on identical layouts.
    pub fn decisions_equal(&self, other: &Policy) -> bool {
        self.t_rounds == other.t_rounds
            && self.grid.levels() == other.grid.levels()
            && self.support == other.support
            && self.first == other.first
            && self.later == other.later
    }

    /// Smallest report the policy can emit in any state reachable from the
    /// root with positive probability.
    pub fn min_reachable_report(&self) -> f64 {
        let levels = self.grid.levels();
        let mut min_report = f64::INFINITY;
        let mut reachable = vec![false; levels.len()];
        for &b in &self.first {
            min_report = min_report.min(levels[b]);
            reachable[b] = true;
        }
        for t in (1..self.t_rounds).rev() {
            let mut next = vec![false; levels.len()];
            for (h, reached) in reachable.iter().enumerate() {
                if !reached {
                    continue;
                }
                for &b in &self.later[t as usize - 1][h] {
                    min_report = min_report.min(levels[b]);
                    next[b] = true;
                }
            }
            reachable = next;
        }
        min_report
    }

    /// The decision table a strategy class prescribes on the Bernoulli
    /// two-level grid, in the same layout as [`solve_single`] output so the
    /// two can be compared state by state.
    pub fn from_class(class: StrategyClass, t_rounds: u32, d: f64) -> Result<Policy> {
        crate::single::check_horizon(t_rounds)?;
        let grid = ReportGrid::bernoulli(d)?;
        let first_zero = usize::from(class.first_report_full());
        let later = (1..t_rounds)
            .map(|t| {
                let on_zero_hist = vec![0, 1];
                let on_full_hist = vec![usize::from(class.maintains_at(t_rounds, t)), 1];
                vec![on_zero_hist, on_full_hist]
            })
            .collect();
        Ok(Policy {
            t_rounds,
            grid,
            support: vec![0, 1],
            first: vec![first_zero, 1],
            later,
        })
    }
}

/// Optimal expected cost-to-go for every state.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    root: f64,
    /// `by_state[t-1][h]` = V(t, h) for `t` in `1..=T-1`.
    by_state: Vec<Vec<f64>>,
}

impl ValueTable {
    /// Expected optimal cost of the whole game.
    pub fn root_value(&self) -> f64 {
        self.root
    }

    /// V(rounds_left, history index). `rounds_left = 0` is the base case 0.
    pub fn value(&self, rounds_left: u32, history_idx: usize) -> f64 {
        if rounds_left == 0 {
            return 0.0;
        }
        self.by_state[rounds_left as usize - 1][history_idx]
    }
}

/// Solver output: the optimal policy and the value of every state.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub policy: Policy,
    pub values: ValueTable,
}

/// Number of DP states a solve would allocate.
pub fn state_count(t_rounds: u32, grid_len: usize) -> u64 {
    1 + (t_rounds as u64 - 1) * grid_len as u64
}

/// Solves the game by backward induction on `grid` under the default state
/// cap (override with [`solve_single_capped`]).
pub fn solve_single(game: &SinglePlayerGame, grid: &ReportGrid) -> Result<SolveResult> {
    solve_single_capped(game, grid, DEFAULT_STATE_CAP)
}

/// [`solve_single`] with an explicit state cap.
pub fn solve_single_capped(
    game: &SinglePlayerGame,
    grid: &ReportGrid,
    cap: u64,
) -> Result<SolveResult> {
    let required = state_count(game.t_rounds(), grid.len());
    if required > cap {
        return Err(FluxError::StateCapExceeded { required, cap });
    }
    let support = game
        .model()
        .support_distribution()
        .ok_or_else(|| FluxError::GridMismatch {
            message: "continuous signal support; discretize the model first".into(),
        })?;
    let dist: Vec<(usize, f64)> = support
        .iter()
        .map(|&(value, prob)| {
            grid.index_of(value)
                .map(|idx| (idx, prob))
                .ok_or_else(|| FluxError::GridMismatch {
                    message: format!("signal support value {value} is not a grid level"),
                })
        })
        .collect::<Result<_>>()?;

    let levels = grid.levels();
    let n = levels.len();
    let t_rounds = game.t_rounds();
    let r = game.r();

    // V(t-1, .) while filling rounds_left = t; starts as V(0, .) = 0.
    let mut v_prev = vec![0.0; n];
    let mut by_state = Vec::with_capacity(t_rounds as usize - 1);
    let mut later = Vec::with_capacity(t_rounds as usize - 1);
    for _t in 1..t_rounds {
        let mut v_here = vec![0.0; n];
        let mut decisions = vec![vec![0usize; dist.len()]; n];
        for h in 0..n {
            let mut expected = 0.0;
            for (spos, &(sidx, prob)) in dist.iter().enumerate() {
                let cost = |b: usize| levels[b] + r * (levels[b] - levels[h]).abs() + v_prev[b];
                let (choice, value) = pick_report(sidx, n - 1, cost);
                decisions[h][spos] = choice;
                expected += prob * value;
            }
            v_here[h] = expected;
        }
        by_state.push(v_here.clone());
        later.push(decisions);
        v_prev = v_here;
    }

    let mut first = vec![0usize; dist.len()];
    let mut root = 0.0;
    for (spos, &(sidx, prob)) in dist.iter().enumerate() {
        let cost = |b: usize| levels[b] + v_prev[b];
        let (choice, value) = pick_report(sidx, n - 1, cost);
        first[spos] = choice;
        root += prob * value;
    }

    Ok(SolveResult {
        policy: Policy {
            t_rounds,
            grid: grid.clone(),
            support: dist.iter().map(|&(idx, _)| idx).collect(),
            first,
            later,
        },
        values: ValueTable { root, by_state },
    })
}

/// Minimum cost over reports `lo..=hi` and the largest index within the tie
/// tolerance of it. The returned value is the exact minimum (not the cost
/// of the tie-broken choice) so the value table stays Bellman-consistent.
fn pick_report(lo: usize, hi: usize, cost: impl Fn(usize) -> f64) -> (usize, f64) {
    let mut min = f64::INFINITY;
    for b in lo..=hi {
        min = min.min(cost(b));
    }
    let mut choice = lo;
    for b in lo..=hi {
        if cost(b) <= min + COST_TIE_TOLERANCE {
            choice = b;
        }
    }
    (choice, min)
}

/// The predicate behind every truthfulness bisection: the policy reports
/// `D` at the root and keeps `D` alive in every later round, for every
/// signal.
pub fn policy_is_honest_till_end(result: &SolveResult) -> bool {
    let policy = &result.policy;
    let top = policy.grid.len() - 1;
    policy.first.iter().all(|&b| b == top)
        && policy
            .later
            .iter()
            .all(|decisions| decisions[top].iter().all(|&b| b == top))
}

/// Finds the rate where `predicate` switches from false to true, to within
/// `tol`, solving a Bernoulli game at every probe.
pub fn bisect_threshold(
    t_rounds: u32,
    p: f64,
    d: f64,
    predicate: impl Fn(&SolveResult) -> bool,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(FluxError::invalid("tol", format!("must be positive, got {tol}")));
    }
    if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
        return Err(FluxError::invalid(
            "lo/hi",
            format!("need 0 <= lo < hi < inf, got [{lo}, {hi}]"),
        ));
    }
    let model = crate::signal::SignalModel::bernoulli(p, d)?;
    let grid = ReportGrid::bernoulli(d)?;
    let probe = |r: f64| -> Result<bool> {
        let game = SinglePlayerGame::new(t_rounds, r, model.clone())?;
        Ok(predicate(&solve_single(&game, &grid)?))
    };
    if probe(lo)? {
        return Err(FluxError::NonBracketing {
            lo,
            hi,
            message: "predicate already true at lo".into(),
        });
    }
    if !probe(hi)? {
        return Err(FluxError::NonBracketing {
            lo,
            hi,
            message: "predicate still false at hi".into(),
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::SignalModel;
    use crate::single::truthful_threshold;
    use proptest::prelude::*;

    fn bernoulli_solve(t: u32, p: f64, r: f64) -> SolveResult {
        let game = SinglePlayerGame::new(t, r, SignalModel::bernoulli(p, 1.0).unwrap()).unwrap();
        solve_single(&game, &ReportGrid::bernoulli(1.0).unwrap()).unwrap()
    }

    #[test]
    fn hand_expanded_two_round_values() {
        // r = 3 (the threshold): value 2.0, honest by tie-break.
        let result = bernoulli_solve(2, 0.5, 3.0);
        assert!((result.values.root_value() - 2.0).abs() < 1e-12);
        assert!(policy_is_honest_till_end(&result));

        // r = 2: lie first, then maintain after a bust. 0.5*2 + 0.5*1.5.
        let result = bernoulli_solve(2, 0.5, 2.0);
        assert!((result.values.root_value() - 1.75).abs() < 1e-12);
        assert!(!policy_is_honest_till_end(&result));
        assert_eq!(result.policy.report_for(1, History::Prior(1.0), 0.0).unwrap(), 1.0);

        // r = 0.5: lie in every round including the last.
        let result = bernoulli_solve(2, 0.5, 0.5);
        assert!((result.values.root_value() - 1.25).abs() < 1e-12);
        assert_eq!(result.policy.report_for(1, History::Prior(1.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_history_zero_signal_always_reports_zero() {
        for r in [0.0, 0.5, 1.0, 2.0, 5.0] {
            for p in [0.2, 0.5, 0.8] {
                let result = bernoulli_solve(4, p, r);
                for t in 1..4 {
                    assert_eq!(
                        result.policy.report_for(t, History::Prior(0.0), 0.0).unwrap(),
                        0.0,
                        "t={t} p={p} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn bisection_recovers_the_closed_form() {
        let r = bisect_threshold(2, 0.5, 1.0, policy_is_honest_till_end, 0.0, 12.0, 1e-9).unwrap();
        assert!((r - 3.0).abs() < 1e-8);
        let r = bisect_threshold(3, 0.5, 1.0, policy_is_honest_till_end, 0.0, 12.0, 1e-9).unwrap();
        assert!((r - 7.0 / 3.0).abs() < 1e-8);
        let r = bisect_threshold(5, 0.3, 1.0, policy_is_honest_till_end, 0.0, 12.0, 1e-9).unwrap();
        assert!((r - truthful_threshold(5, 0.3).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn non_bracketing_rates_are_rejected() {
        let err =
            bisect_threshold(2, 0.5, 1.0, policy_is_honest_till_end, 5.0, 12.0, 1e-6).unwrap_err();
        assert!(matches!(err, FluxError::NonBracketing { .. }));
        let err =
            bisect_threshold(2, 0.5, 1.0, policy_is_honest_till_end, 0.0, 1.0, 1e-6).unwrap_err();
        assert!(matches!(err, FluxError::NonBracketing { .. }));
    }

    #[test]
    fn state_cap_is_enforced_with_a_sizing_message() {
        let game =
            SinglePlayerGame::new(6, 1.0, SignalModel::bernoulli(0.5, 1.0).unwrap()).unwrap();
        let grid = ReportGrid::bernoulli(1.0).unwrap();
        let err = solve_single_capped(&game, &grid, 5).unwrap_err();
        match err {
            FluxError::StateCapExceeded { required, cap } => {
                assert_eq!(required, state_count(6, 2));
                assert_eq!(cap, 5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn continuous_models_and_off_grid_support_are_rejected() {
        let game = SinglePlayerGame::new(3, 1.0, SignalModel::uniform(1.0).unwrap()).unwrap();
        let grid = ReportGrid::bernoulli(1.0).unwrap();
        assert!(matches!(
            solve_single(&game, &grid).unwrap_err(),
            FluxError::GridMismatch { .. }
        ));

        let model = SignalModel::empirical(vec![(0.0, 0.5), (0.4, 0.2), (1.0, 0.3)], 1.0).unwrap();
        let game = SinglePlayerGame::new(3, 1.0, model).unwrap();
        assert!(matches!(
            solve_single(&game, &grid).unwrap_err(),
            FluxError::GridMismatch { .. }
        ));
    }

    #[test]
    fn covering_grid_accepts_the_support() {
        let model = SignalModel::empirical(vec![(0.0, 0.5), (0.4, 0.2), (1.0, 0.3)], 1.0).unwrap();
        let grid = ReportGrid::covering(&model).unwrap();
        assert_eq!(grid.levels(), &[0.0, 0.4, 1.0]);
        let game = SinglePlayerGame::new(3, 1.0, model).unwrap();
        assert!(solve_single(&game, &grid).is_ok());
    }

    #[test]
    fn class_policies_share_the_solver_layout() {
        let result = bernoulli_solve(5, 0.3, 2.0);
        let induced = Policy::from_class(StrategyClass::LyingTillBusted, 5, 1.0).unwrap();
        assert!(result.policy.decisions_equal(&induced));
    }

    fn check_bellman(result: &SolveResult, game: &SinglePlayerGame, grid: &ReportGrid) {
        let levels = grid.levels();
        let dist: Vec<(usize, f64)> = game
            .model()
            .support_distribution()
            .unwrap()
            .iter()
            .map(|&(v, p)| (grid.index_of(v).unwrap(), p))
            .collect();
        for t in 1..game.t_rounds() {
            for h in 0..levels.len() {
                let mut expected = 0.0;
                for &(sidx, prob) in &dist {
                    let best = (sidx..levels.len())
                        .map(|b| {
                            levels[b]
                                + game.r() * (levels[b] - levels[h]).abs()
                                + result.values.value(t - 1, b)
                        })
                        .fold(f64::INFINITY, f64::min);
                    expected += prob * best;
                }
                assert!(
                    (expected - result.values.value(t, h)).abs() <= 1e-12,
                    "Bellman violation at t={t} h={h}"
                );
            }
        }
        let mut root = 0.0;
        for &(sidx, prob) in &dist {
            let best = (sidx..levels.len())
                .map(|b| levels[b] + result.values.value(game.t_rounds() - 1, b))
                .fold(f64::INFINITY, f64::min);
            root += prob * best;
        }
        assert!((root - result.values.root_value()).abs() <= 1e-12);
    }

    proptest! {
        #[test]
        fn values_are_bellman_consistent(
            t in 2u32..7,
            p in 0.05f64..=0.95,
            r in 0.0f64..5.0,
            w in 0.05f64..=0.9,
        ) {
            // A three-level model exercises non-binary grids.
            let model = SignalModel::empirical(
                vec![(0.0, 1.0 - w / 2.0 - w / 3.0), (0.5, w / 2.0), (1.0, w / 3.0)],
                1.0,
            ).unwrap();
            let grid = ReportGrid::covering(&model).unwrap();
            let game = SinglePlayerGame::new(t, r, model).unwrap();
            let result = solve_single(&game, &grid).unwrap();
            check_bellman(&result, &game, &grid);

            let bernoulli = SignalModel::bernoulli(p, 1.0).unwrap();
            let grid = ReportGrid::bernoulli(1.0).unwrap();
            let game = SinglePlayerGame::new(t, r, bernoulli).unwrap();
            let result = solve_single(&game, &grid).unwrap();
            check_bellman(&result, &game, &grid);
        }

        #[test]
        fn midpoint_levels_never_improve_bernoulli_games(
            t in 2u32..7,
            p in 0.05f64..=0.95,
            r in 0.0f64..5.0,
        ) {
            let model = SignalModel::bernoulli(p, 1.0).unwrap();
            let game = SinglePlayerGame::new(t, r, model).unwrap();
            let two = solve_single(&game, &ReportGrid::bernoulli(1.0).unwrap()).unwrap();
            let wide = solve_single(
                &game,
                &ReportGrid::new(vec![0.0, 0.25, 0.5, 1.0], 1.0).unwrap(),
            ).unwrap();
            prop_assert!(
                (two.values.root_value() - wide.values.root_value()).abs() <= 1e-12
            );
        }
    }
}
