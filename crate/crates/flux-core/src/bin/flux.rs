//! Command-line surface for the flux toolkit: scenario files in;
//! thresholds, classifications, traces, and figure data out.
//!
//! Every command accepts `--scenario PATH` plus flags that override the
//! file's keys. Exit codes: 0 success, 1 validation or verification
//! failure, 2 state-cap failure. `FLUX_STATE_CAP` overrides the solver's
//! default state cap.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flux_core::error::{FluxError, Result};
use flux_core::figures::{curve_csv, figure_csv, FigureId};
use flux_core::format::sig9;
use flux_core::multi::{
    best_response_capped, bisect_equilibrium_threshold, check_equilibrium, delta_ec_bound,
    dse_threshold, ne_threshold, EquilibriumKind, MultiPlayerGame, OpponentPolicy,
};
use flux_core::oracle::{
    bisect_threshold, policy_is_honest_till_end, solve_single_capped, Policy, ReportGrid,
    DEFAULT_STATE_CAP,
};
use flux_core::reduction::{alpha_threshold_single, AlphaLevel};
use flux_core::scenario::{GameKind, ModelSpec, RawScenario, Scenario};
use flux_core::sim::{
    monte_carlo_multi, monte_carlo_single, run_multi_game, run_single_game, ClassReportPolicy,
    CostSummary, MultiReportPolicy, SingleReportPolicy,
};
use flux_core::single::{
    classify_strategy, history_threshold, maintains_after_bust, threshold_curve,
    truthful_threshold, SinglePlayerGame, StrategyClass, Threshold,
};

#[derive(Parser)]
#[command(
    name = "flux",
    version,
    about = "Solver and simulator for the flux reporting-penalty mechanism"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Scenario keys as flags; set flags override the scenario file.
#[derive(Args, Clone, Default)]
struct ParamFlags {
    /// Scenario file (JSON); flags below override its keys.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Number of rounds (> 1).
    #[arg(long = "T")]
    t: Option<u32>,
    /// Bernoulli busted probability.
    #[arg(long)]
    p: Option<f64>,
    /// Penalty rate.
    #[arg(long)]
    r: Option<f64>,
    /// Gross consumption D.
    #[arg(long)]
    d: Option<f64>,
    /// Player count (multi-player).
    #[arg(long)]
    n: Option<usize>,
    /// Shared overhead C (multi-player; defaults to n*D).
    #[arg(long)]
    c: Option<f64>,
    /// Truthfulness bar as a fraction of D.
    #[arg(long)]
    alpha: Option<f64>,
    /// Signal model: bernoulli | uniform | empirical:PATH.
    #[arg(long)]
    model: Option<String>,
    /// Monte Carlo trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Reporting policy for `simulate`.
    #[arg(long)]
    policy: Option<String>,
}

impl ParamFlags {
    /// Loads the scenario file (if any) and merges the set flags over it.
    fn resolve(&self) -> Result<Scenario> {
        let base = match &self.scenario {
            Some(path) => RawScenario::from_path(path)?,
            None => RawScenario::default(),
        };
        let model = match &self.model {
            None => None,
            Some(text) => Some(parse_model_flag(text)?),
        };
        let overrides = RawScenario {
            kind: None,
            t: self.t,
            p: self.p,
            r: self.r,
            d: self.d,
            n: self.n,
            c: self.c,
            alpha: self.alpha,
            model,
            trials: self.trials,
            seed: self.seed,
            policy: self.policy.clone(),
        };
        base.merged_with(overrides).validate()
    }
}

fn parse_model_flag(text: &str) -> Result<ModelSpec> {
    match text {
        "bernoulli" => Ok(ModelSpec::Named("bernoulli".into())),
        "uniform" => Ok(ModelSpec::Named("uniform".into())),
        other => {
            if let Some(path) = other.strip_prefix("empirical:") {
                let body = std::fs::read_to_string(path)?;
                let points: Vec<(f64, f64)> = serde_json::from_str(&body)?;
                Ok(ModelSpec::Empirical { empirical: points })
            } else {
                Err(FluxError::invalid(
                    "model",
                    format!("expected bernoulli, uniform or empirical:PATH, got \"{other}\""),
                ))
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Truthfulness thresholds: single/multi, exact Bernoulli or alpha-relaxed.
    Threshold {
        #[command(flatten)]
        params: ParamFlags,
        /// Equilibrium notion for multi-player output: ne | dse (default both).
        #[arg(long)]
        kind: Option<String>,
        /// Write output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal single-player strategy class at a rate.
    Classify {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-round threshold table as CSV.
    Curve {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded playouts: one trace (trials=1) or a Monte Carlo summary.
    Simulate {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force equilibrium check at the scenario's rate.
    Equilibrium {
        #[command(flatten)]
        params: ParamFlags,
        /// Equilibrium notion: ne | dse.
        #[arg(long, default_value = "ne")]
        kind: String,
        /// Also bisect the empirical threshold to this tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Figure data files: fig2 | fig3 | fig4.
    Figure {
        /// Which figure to emit.
        #[arg(long)]
        which: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Oracle-vs-closed-form verification suite.
    Verify {
        /// Bisection tolerance for threshold recovery.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Threshold { params, kind, out } => {
            let scenario = params.resolve()?;
            let text = threshold_output(&scenario, kind.as_deref())?;
            write_out(out.as_deref(), &text)
        }
        Command::Classify { params, out } => {
            let scenario = params.resolve()?;
            let class = classify_strategy(
                scenario.t_rounds,
                scenario.require_p()?,
                scenario.require_r()?,
            )?;
            write_out(out.as_deref(), &format!("strategy,{class}\n"))
        }
        Command::Curve { params, out } => {
            let scenario = params.resolve()?;
            let curve = threshold_curve(scenario.t_rounds, scenario.require_p()?)?;
            write_out(out.as_deref(), &curve_csv(&curve))
        }
        Command::Simulate { params, out } => {
            let scenario = params.resolve()?;
            let text = simulate_output(&scenario)?;
            write_out(out.as_deref(), &text)
        }
        Command::Equilibrium { params, kind, tol, out } => {
            let scenario = params.resolve()?;
            let text = equilibrium_output(&scenario, &kind, tol)?;
            write_out(out.as_deref(), &text)
        }
        Command::Figure { which, out } => {
            let id: FigureId = which.parse()?;
            write_out(out.as_deref(), &figure_csv(id)?)
        }
        Command::Verify { tol } => verify(tol),
    }
}

fn write_out(out: Option<&std::path::Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn state_cap() -> Result<u64> {
    match std::env::var("FLUX_STATE_CAP") {
        Ok(text) => text.trim().parse::<u64>().map_err(|_| {
            FluxError::invalid(
                "FLUX_STATE_CAP",
                format!("must be a nonnegative integer, got \"{text}\""),
            )
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_STATE_CAP),
        Err(err) => Err(FluxError::invalid("FLUX_STATE_CAP", err.to_string())),
    }
}

fn parse_kind(text: &str) -> Result<EquilibriumKind> {
    match text {
        "ne" => Ok(EquilibriumKind::Ne),
        "dse" => Ok(EquilibriumKind::Dse),
        other => Err(FluxError::Scenario {
            field: "kind".into(),
            message: format!("expected ne or dse, got \"{other}\""),
        }),
    }
}

fn threshold_line(name: &str, value: Threshold) -> String {
    format!("{name},{}\n", value.display_sig9())
}

fn threshold_output(scenario: &Scenario, kind: Option<&str>) -> Result<String> {
    let t = scenario.t_rounds;
    let is_bernoulli = scenario.model.bernoulli_p().is_some();
    if !is_bernoulli && scenario.alpha.is_none() {
        return Err(FluxError::Scenario {
            field: "alpha".into(),
            message: "a non-Bernoulli model has no exact threshold; pass --alpha for the \
                      alpha-truthful bound"
                .into(),
        });
    }
    let mut out = String::new();
    match scenario.kind {
        GameKind::Single => match scenario.alpha {
            None => {
                let p = scenario.require_p()?;
                out.push_str(&threshold_line(
                    "truthful_threshold",
                    Threshold::Finite(truthful_threshold(t, p)?),
                ));
            }
            Some(alpha) => {
                let level = AlphaLevel::new(alpha)?;
                out.push_str(&threshold_line(
                    "alpha_threshold",
                    alpha_threshold_single(t, &scenario.model, level)?,
                ));
            }
        },
        GameKind::Multi => {
            let n = scenario.n.expect("validated multi scenario has n");
            let c = scenario.c.expect("validated multi scenario has c");
            let d = scenario.d;
            let kinds: Vec<EquilibriumKind> = match kind {
                None => vec![EquilibriumKind::Ne, EquilibriumKind::Dse],
                Some(text) => vec![parse_kind(text)?],
            };
            for k in kinds {
                match scenario.alpha {
                    None => {
                        let p = scenario.require_p()?;
                        let value = match k {
                            EquilibriumKind::Ne => ne_threshold(t, p, n, c, d)?,
                            EquilibriumKind::Dse => dse_threshold(t, p, n, c, d)?,
                        };
                        out.push_str(&threshold_line(
                            &format!("{k}_threshold"),
                            Threshold::Finite(value),
                        ));
                    }
                    Some(alpha) => {
                        let level = AlphaLevel::new(alpha)?;
                        let value = flux_core::multi::alpha_threshold_multi(
                            k,
                            t,
                            &scenario.model,
                            level,
                            n,
                            c,
                            d,
                        )?;
                        out.push_str(&threshold_line(&format!("alpha_{k}_threshold"), value));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn summary_csv(summary: &CostSummary, label: &str) -> String {
    let mut out = String::new();
    out.push_str("# flux monte carlo summary\n");
    out.push_str(&format!("# policy: {label}\n"));
    out.push_str(&format!(
        "# trials: {}, seed: {}\n",
        summary.trials, summary.seed
    ));
    out.push_str("player,mean_cost,std_error\n");
    for (player, (mean, se)) in summary.mean.iter().zip(&summary.std_error).enumerate() {
        out.push_str(&format!("{player},{},{}\n", sig9(*mean), sig9(*se)));
    }
    out
}

fn single_policy(scenario: &Scenario, game: &SinglePlayerGame) -> Result<Box<dyn SingleReportPolicy>> {
    let name = scenario.policy.as_deref().unwrap_or("optimal");
    let class = match name {
        "optimal" => {
            let grid = ReportGrid::covering(game.model())?;
            let solved = solve_single_capped(game, &grid, state_cap()?)?;
            return Ok(Box::new(solved.policy));
        }
        "classified" => classify_strategy(scenario.t_rounds, scenario.require_p()?, game.r())?,
        "honest-till-end" => StrategyClass::HonestTillEnd,
        "lying-till-end" => StrategyClass::LyingTillEnd,
        "lying-till-busted" => StrategyClass::LyingTillBusted,
        other => {
            return Err(FluxError::Scenario {
                field: "policy".into(),
                message: format!(
                    "expected optimal, classified, honest-till-end, lying-till-end or \
                     lying-till-busted, got \"{other}\""
                ),
            })
        }
    };
    Ok(Box::new(ClassReportPolicy::new(
        class,
        scenario.t_rounds,
        game.d(),
    )))
}

fn multi_policy(scenario: &Scenario, game: &MultiPlayerGame) -> Result<OpponentPolicy> {
    let name = scenario.policy.as_deref().unwrap_or("honest-till-end");
    match name {
        "honest-till-end" => Ok(OpponentPolicy::honest(game.t_rounds(), game.n())),
        "lying-till-end" => Ok(OpponentPolicy::lying_till_end(game.t_rounds(), game.n())),
        "lying-till-busted" => Ok(OpponentPolicy::lying_till_busted(game.t_rounds(), game.n())),
        other => Err(FluxError::Scenario {
            field: "policy".into(),
            message: format!(
                "multi-player simulation takes honest-till-end, lying-till-end or \
                 lying-till-busted, got \"{other}\""
            ),
        }),
    }
}

fn simulate_output(scenario: &Scenario) -> Result<String> {
    match scenario.kind {
        GameKind::Single => {
            let game = scenario.single_game()?;
            let policy = single_policy(scenario, &game)?;
            if scenario.trials == 1 {
                let trace = run_single_game(&game, policy.as_ref(), scenario.seed)?;
                Ok(trace.to_csv())
            } else {
                let summary =
                    monte_carlo_single(&game, policy.as_ref(), scenario.trials, scenario.seed)?;
                Ok(summary_csv(&summary, &policy.label()))
            }
        }
        GameKind::Multi => {
            let game = scenario.multi_game()?;
            let shared = multi_policy(scenario, &game)?;
            let policies: Vec<&dyn MultiReportPolicy> =
                (0..game.n()).map(|_| &shared as &dyn MultiReportPolicy).collect();
            if scenario.trials == 1 {
                let trace = run_multi_game(&game, &policies, scenario.seed)?;
                Ok(trace.to_csv())
            } else {
                let summary = monte_carlo_multi(&game, &policies, scenario.trials, scenario.seed)?;
                Ok(summary_csv(
                    &summary,
                    MultiReportPolicy::label(&shared).as_str(),
                ))
            }
        }
    }
}

fn equilibrium_output(scenario: &Scenario, kind: &str, tol: Option<f64>) -> Result<String> {
    let kind = parse_kind(kind)?;
    let game = scenario.multi_game()?;
    let report = check_equilibrium(&game, kind)?;
    let mut out = String::new();
    out.push_str(&format!("kind,{}\n", report.kind));
    out.push_str(&format!("r_tested,{}\n", sig9(report.r_tested)));
    out.push_str(&format!("threshold,{}\n", sig9(report.threshold)));
    out.push_str(&format!("holds,{}\n", report.holds));
    if let Some(witness) = &report.witness {
        out.push_str(&format!("witness_player,{}\n", witness.player));
        out.push_str(&format!("witness_round,{}\n", witness.round_chrono));
        out.push_str(&format!(
            "witness_report,{}\n",
            sig9(witness.deviating_report)
        ));
        out.push_str(&format!(
            "witness_improvement,{}\n",
            sig9(witness.improvement)
        ));
        out.push_str(&format!("witness_profile,{}\n", witness.opponent_profile));
    }
    if let Some(tol) = tol {
        let hi = 2.0 * report.threshold + 1.0;
        let bisected = bisect_equilibrium_threshold(&game, kind, 0.0, hi, tol)?;
        out.push_str(&format!("bisected_threshold,{}\n", sig9(bisected)));
    }
    Ok(out)
}

/// One verification check: name plus outcome.
struct Check {
    name: &'static str,
    outcome: std::result::Result<(), String>,
}

fn verify(tol: f64) -> Result<()> {
    let cap = state_cap()?;
    let checks = vec![
        Check {
            name: "closed-form truthful threshold matches DP bisection",
            outcome: verify_threshold_bisection(tol),
        },
        Check {
            name: "strategy classifier matches DP policies",
            outcome: verify_classifier(cap),
        },
        Check {
            name: "maintain rule flips at the history threshold",
            outcome: verify_maintain_rule(),
        },
        Check {
            name: "truthful threshold decreases toward 1/p",
            outcome: verify_monotonicity(),
        },
        Check {
            name: "equilibrium table decreases and dse dominates ne",
            outcome: verify_figure_table(),
        },
        Check {
            name: "two-player game reduces to the single-player threshold",
            outcome: verify_two_player_reduction(),
        },
        Check {
            name: "expected-cost gap matches its closed form at one round",
            outcome: verify_delta_ec_base(),
        },
        Check {
            name: "equilibrium checker agrees with the thresholds",
            outcome: verify_equilibrium_smoke(),
        },
    ];
    let mut failures = 0u32;
    for check in &checks {
        match &check.outcome {
            Ok(()) => println!("ok   {}", check.name),
            Err(detail) => {
                failures += 1;
                println!("FAIL {} ({detail})", check.name);
            }
        }
    }
    println!("{} checks, {} failed", checks.len(), failures);
    if failures > 0 {
        return Err(FluxError::invalid(
            "verify",
            format!("{failures} verification check(s) failed"),
        ));
    }
    Ok(())
}

fn verify_threshold_bisection(tol: f64) -> std::result::Result<(), String> {
    for t in 2..=5u32 {
        for p in [0.3, 0.5, 0.7] {
            let closed = truthful_threshold(t, p).map_err(|e| e.to_string())?;
            let recovered = bisect_threshold(
                t,
                p,
                1.0,
                policy_is_honest_till_end,
                0.0,
                2.0 * closed + 1.0,
                tol,
            )
            .map_err(|e| e.to_string())?;
            let rel = (recovered - closed).abs() / closed;
            if rel > 1e-6 {
                return Err(format!("T={t} p={p}: closed {closed} vs DP {recovered}"));
            }
        }
    }
    Ok(())
}

fn verify_classifier(cap: u64) -> std::result::Result<(), String> {
    for t in 2..=5u32 {
        for p in [0.3, 0.5, 0.7] {
            let mut rates = vec![0.3, 0.6, 0.9, 1.0, 1.05, 1.0 / (2.0 * p)];
            rates.push(truthful_threshold(t, p).map_err(|e| e.to_string())?);
            for tt in 1..t {
                let h = history_threshold(tt, p).map_err(|e| e.to_string())?;
                rates.extend([h, h - 1e-4, h + 1e-4]);
            }
            for r in rates {
                if r < 0.0 {
                    continue;
                }
                let class = classify_strategy(t, p, r).map_err(|e| e.to_string())?;
                let from_class = Policy::from_class(class, t, 1.0).map_err(|e| e.to_string())?;
                let model =
                    flux_core::signal::SignalModel::bernoulli(p, 1.0).map_err(|e| e.to_string())?;
                let game = SinglePlayerGame::new(t, r, model).map_err(|e| e.to_string())?;
                let grid = ReportGrid::bernoulli(1.0).map_err(|e| e.to_string())?;
                let solved = solve_single_capped(&game, &grid, cap).map_err(|e| e.to_string())?;
                if !solved.policy.decisions_equal(&from_class) {
                    return Err(format!("T={t} p={p} r={r}: classifier {class} != DP policy"));
                }
            }
        }
    }
    Ok(())
}

fn verify_maintain_rule() -> std::result::Result<(), String> {
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let h1 = history_threshold(1, p).map_err(|e| e.to_string())?;
        if (h1 - 1.0).abs() > 1e-12 {
            return Err(format!("h(1) at p={p} is {h1}, expected 1"));
        }
        for t in 1..=5u32 {
            let h = history_threshold(t, p).map_err(|e| e.to_string())?;
            let above = maintains_after_bust(t, p, h + 1e-6).map_err(|e| e.to_string())?;
            let below = maintains_after_bust(t, p, (h - 1e-6).max(0.0)).map_err(|e| e.to_string())?;
            if !above || below {
                return Err(format!(
                    "p={p} t={t}: maintain rule does not flip at h={h}"
                ));
            }
        }
    }
    Ok(())
}

fn verify_monotonicity() -> std::result::Result<(), String> {
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let limit = 1.0 / p;
        let mut prev = truthful_threshold(2, p).map_err(|e| e.to_string())?;
        for t in 3..=30u32 {
            let here = truthful_threshold(t, p).map_err(|e| e.to_string())?;
            // The per-horizon decrement is about (1-p)^(T-1); once the value
            // sits within a few dozen ulps of its 1/p limit the decrement is
            // no longer representable and only non-increase can be required.
            let clear_of_limit = prev - limit > 32.0 * f64::EPSILON * limit;
            if here > prev || (clear_of_limit && here == prev) {
                return Err(format!("p={p}: threshold fails to decrease at T={t}"));
            }
            if here < limit {
                return Err(format!("p={p} T={t}: threshold {here} below 1/p"));
            }
            prev = here;
        }
        let tail = truthful_threshold(200, p).map_err(|e| e.to_string())?;
        if (tail - limit).abs() > 1e-6 {
            return Err(format!("p={p}: T=200 threshold {tail} far from 1/p"));
        }
    }
    Ok(())
}

fn verify_figure_table() -> std::result::Result<(), String> {
    let csv = flux_core::figures::equilibrium_table_csv().map_err(|e| e.to_string())?;
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .filter(|line| !line.starts_with('#'))
        .skip(1)
        .map(|line| line.split(',').collect())
        .collect();
    if rows.len() != 29 {
        return Err(format!("expected 29 rows, got {}", rows.len()));
    }
    // Strictness lives on the full-precision values; the 9-digit cells
    // must be their exact rendered images.
    let mut previous: Option<[f64; 4]> = None;
    for row in &rows {
        let t: u32 = row[0].parse().map_err(|_| format!("bad T cell {}", row[0]))?;
        let values = [
            ne_threshold(t, 1.0 / 3.0, 20, 20.0, 1.0).map_err(|e| e.to_string())?,
            dse_threshold(t, 1.0 / 3.0, 20, 20.0, 1.0).map_err(|e| e.to_string())?,
            ne_threshold(t, 2.0 / 3.0, 20, 20.0, 1.0).map_err(|e| e.to_string())?,
            dse_threshold(t, 2.0 / 3.0, 20, 20.0, 1.0).map_err(|e| e.to_string())?,
        ];
        for (cell, value) in row[1..].iter().zip(&values) {
            if *cell != sig9(*value) {
                return Err(format!("T={t}: cell {cell} is not the image of {value}"));
            }
        }
        if values[1] < values[0] || values[3] < values[2] {
            return Err(format!("dse below ne at T={t}"));
        }
        if let Some(prev) = previous {
            for col in 0..4 {
                if values[col] >= prev[col] {
                    return Err(format!("column {col} fails to decrease at T={t}"));
                }
            }
        }
        previous = Some(values);
    }
    Ok(())
}

fn verify_two_player_reduction() -> std::result::Result<(), String> {
    for t in 2..=7u32 {
        for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
            for (c, d) in [(2.0, 1.0), (5.0, 1.0)] {
                let lhs = ne_threshold(t, p, 2, c, d).map_err(|e| e.to_string())?;
                let rhs = (c / (2.0 * d)) * truthful_threshold(t, p).map_err(|e| e.to_string())?;
                if lhs != rhs {
                    return Err(format!("T={t} p={p} C={c}: {lhs} != {rhs}"));
                }
            }
        }
    }
    Ok(())
}

fn verify_delta_ec_base() -> std::result::Result<(), String> {
    for p in [0.2, 0.5, 0.8] {
        for n in [2usize, 3, 5] {
            for r in [0.0, 0.5, 1.0, 2.0] {
                let (c, d) = (n as f64 * 1.5, 1.0);
                let got = delta_ec_bound(1, p, n, c, d, r).map_err(|e| e.to_string())?;
                let m = (c / n as f64) * (1.0 - (1.0 - p).powi(n as i32 - 1)) / p;
                let expected = (1.0 - p) * m - p * r * d;
                if (got - expected).abs() > 1e-12 {
                    return Err(format!("p={p} n={n} r={r}: {got} vs {expected}"));
                }
            }
        }
    }
    let zero = delta_ec_bound(1, 0.5, 2, 2.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    if zero != 0.0 {
        return Err(format!("boundary case should vanish, got {zero}"));
    }
    Ok(())
}

fn verify_equilibrium_smoke() -> std::result::Result<(), String> {
    let model = flux_core::signal::SignalModel::bernoulli(0.5, 1.0).map_err(|e| e.to_string())?;
    let game = |r: f64| {
        MultiPlayerGame::new(2, 2.0, 2, r, model.clone()).map_err(|e| e.to_string())
    };
    let at_threshold = check_equilibrium(&game(3.0)?, EquilibriumKind::Ne)
        .map_err(|e| e.to_string())?;
    if !at_threshold.holds {
        return Err("NE should hold at its threshold".into());
    }
    let below = check_equilibrium(&game(2.9)?, EquilibriumKind::Ne).map_err(|e| e.to_string())?;
    if below.holds || below.witness.is_none() {
        return Err("NE should fail below its threshold with a witness".into());
    }
    let dse = check_equilibrium(&game(3.0)?, EquilibriumKind::Dse).map_err(|e| e.to_string())?;
    if !dse.holds {
        return Err("DSE should hold at its threshold".into());
    }
    let base = game(1.0)?;
    let bisected = bisect_equilibrium_threshold(&base, EquilibriumKind::Ne, 0.0, 7.0, 1e-4)
        .map_err(|e| e.to_string())?;
    if (bisected - 3.0).abs() > 1e-3 {
        return Err(format!("bisected NE threshold {bisected}, expected 3.0"));
    }
    let opponents = vec![OpponentPolicy::lying_till_busted(2, 2)];
    let br = best_response_capped(&base, &opponents, DEFAULT_STATE_CAP)
        .map_err(|e| e.to_string())?;
    if !br.value.is_finite() {
        return Err("best response value should be finite".into());
    }
    Ok(())
}
