//! Scenario files: the JSON surface the CLI reads, with field-level
//! validation errors.
//!
//! A scenario is a partial parameter set; command-line flags merge over it
//! field by field. Validation resolves defaults (single-player kind, a
//! Bernoulli model when only `p` is given, `C = n*D` when the overhead is
//! omitted) and names the offending key on every failure.

use std::path::Path;

use serde::Deserialize;

use crate::error::{FluxError, Result};
use crate::multi::MultiPlayerGame;
use crate::signal::SignalModel;
use crate::single::SinglePlayerGame;

/// Which game a scenario describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    Single,
    Multi,
}

/// A signal model as written in a scenario file: a name, or an explicit
/// empirical distribution.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Named(String),
    Empirical { empirical: Vec<(f64, f64)> },
}

/// The raw, unvalidated key set of a scenario file. Every field is
/// optional so flag overrides can merge over file contents.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub kind: Option<String>,
    #[serde(rename = "T")]
    pub t: Option<u32>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    #[serde(rename = "D")]
    pub d: Option<f64>,
    pub n: Option<usize>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub model: Option<ModelSpec>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub policy: Option<String>,
}

impl RawScenario {
    pub fn from_path(path: &Path) -> Result<RawScenario> {
        let text = std::fs::read_to_string(path)?;
        RawScenario::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<RawScenario> {
        Ok(serde_json::from_str(text)?)
    }

    /// Field-by-field merge; `overrides` wins wherever it is set.
    pub fn merged_with(self, overrides: RawScenario) -> RawScenario {
        RawScenario {
            kind: overrides.kind.or(self.kind),
            t: overrides.t.or(self.t),
            p: overrides.p.or(self.p),
            r: overrides.r.or(self.r),
            d: overrides.d.or(self.d),
            n: overrides.n.or(self.n),
            c: overrides.c.or(self.c),
            alpha: overrides.alpha.or(self.alpha),
            model: overrides.model.or(self.model),
            trials: overrides.trials.or(self.trials),
            seed: overrides.seed.or(self.seed),
            policy: overrides.policy.or(self.policy),
        }
    }

    /// Resolves defaults and checks every invariant, naming the offending
    /// key on failure.
    pub fn validate(self) -> Result<Scenario> {
        let fail = |field: &str, message: String| -> FluxError {
            FluxError::Scenario {
                field: field.to_string(),
                message,
            }
        };

        let t_rounds = self
            .t
            .ok_or_else(|| fail("T", "missing required key".into()))?;
        if t_rounds < 2 {
            return Err(fail(
                "T",
                format!("the game needs T > 1 rounds, got {t_rounds}"),
            ));
        }
        let d = self.d.unwrap_or(1.0);
        if !(d.is_finite() && d > 0.0) {
            return Err(fail("D", format!("must be positive, got {d}")));
        }
        if let Some(p) = self.p {
            if !(0.0..=1.0).contains(&p) {
                return Err(fail("p", format!("must lie in [0, 1], got {p}")));
            }
        }
        if let Some(r) = self.r {
            if !(r.is_finite() && r >= 0.0) {
                return Err(fail("r", format!("must be a nonnegative rate, got {r}")));
            }
        }
        if let Some(alpha) = self.alpha {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(fail("alpha", format!("must lie in (0, 1], got {alpha}")));
            }
        }
        let trials = self.trials.unwrap_or(10_000);
        if trials < 1 {
            return Err(fail("trials", "need at least one trial".into()));
        }

        let model = match &self.model {
            None => {
                let p = self.p.ok_or_else(|| {
                    fail(
                        "model",
                        "no model given and no p for the default bernoulli".into(),
                    )
                })?;
                SignalModel::bernoulli(p, d).map_err(|e| fail("p", e.to_string()))?
            }
            Some(ModelSpec::Named(name)) => match name.as_str() {
                "bernoulli" => {
                    let p = self
                        .p
                        .ok_or_else(|| fail("p", "bernoulli model needs p".into()))?;
                    SignalModel::bernoulli(p, d).map_err(|e| fail("p", e.to_string()))?
                }
                "uniform" => SignalModel::uniform(d).map_err(|e| fail("D", e.to_string()))?,
                other => {
                    return Err(fail("model", format!("unknown model kind \"{other}\"")));
                }
            },
            Some(ModelSpec::Empirical { empirical }) => {
                // D defaults to the largest support value when not given.
                let max_value = empirical
                    .iter()
                    .map(|&(v, _)| v)
                    .fold(f64::NEG_INFINITY, f64::max);
                let d_model = if self.d.is_some() { d } else { max_value };
                SignalModel::empirical(empirical.clone(), d_model)
                    .map_err(|e| fail("model", e.to_string()))?
            }
        };
        let d = model.d();

        let kind = match self.kind.as_deref() {
            None => {
                if self.n.is_some() || self.c.is_some() {
                    GameKind::Multi
                } else {
                    GameKind::Single
                }
            }
            Some("single") => GameKind::Single,
            Some("multi") => GameKind::Multi,
            Some(other) => {
                return Err(fail("kind", format!("expected single or multi, got \"{other}\"")));
            }
        };

        let (n, c) = match kind {
            GameKind::Single => (None, None),
            GameKind::Multi => {
                let n = self
                    .n
                    .ok_or_else(|| fail("n", "multi-player scenario needs n".into()))?;
                if n < 2 {
                    return Err(fail("n", format!("need at least 2 players, got {n}")));
                }
                let floor = n as f64 * d;
                let c = self.c.unwrap_or(floor);
                if !(c.is_finite() && c > 0.0) {
                    return Err(fail("C", format!("must be positive, got {c}")));
                }
                if c < floor {
                    return Err(fail(
                        "C",
                        format!("must satisfy C >= n*D = {floor}, got {c}"),
                    ));
                }
                (Some(n), Some(c))
            }
        };

        Ok(Scenario {
            kind,
            t_rounds,
            p: self.p,
            r: self.r,
            d,
            n,
            c,
            alpha: self.alpha,
            model,
            trials,
            seed: self.seed.unwrap_or(0),
            policy: self.policy,
        })
    }
}

/// A validated scenario with defaults resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: GameKind,
    pub t_rounds: u32,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub d: f64,
    pub n: Option<usize>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub model: SignalModel,
    pub trials: u64,
    pub seed: u64,
    pub policy: Option<String>,
}

/// Loads and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    RawScenario::from_path(path)?.validate()
}

impl Scenario {
    /// The penalty rate, required by commands that play games.
    pub fn require_r(&self) -> Result<f64> {
        self.r.ok_or_else(|| FluxError::Scenario {
            field: "r".to_string(),
            message: "this command needs a penalty rate".to_string(),
        })
    }

    pub fn require_p(&self) -> Result<f64> {
        self.p.ok_or_else(|| FluxError::Scenario {
            field: "p".to_string(),
            message: "this command needs a Bernoulli busted probability".to_string(),
        })
    }

    pub fn single_game(&self) -> Result<SinglePlayerGame> {
        SinglePlayerGame::new(self.t_rounds, self.require_r()?, self.model.clone())
    }

    pub fn multi_game(&self) -> Result<MultiPlayerGame> {
        let n = self.n.ok_or_else(|| FluxError::Scenario {
            field: "n".to_string(),
            message: "this command needs a player count".to_string(),
        })?;
        let c = self.c.unwrap_or(n as f64 * self.d);
        MultiPlayerGame::new(n, c, self.t_rounds, self.require_r()?, self.model.clone())
    }
}
