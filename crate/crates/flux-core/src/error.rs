//! Error type shared across the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, FluxError>;

/// Everything that can go wrong constructing games, evaluating thresholds,
/// solving, or running scenarios.
#[derive(Debug, thiserror::Error)]
pub enum FluxError {
    /// A parameter violated its documented range or relationship.
    #[error("invalid `{field}`: {message}")]
    InvalidParameter {
        field: &'static str,
        message: String,
    },

    /// A scenario file field failed validation; `field` is the JSON key.
    #[error("scenario field `{field}`: {message}")]
    Scenario { field: String, message: String },

    /// A scenario file could not be read.
    #[error("cannot read scenario: {0}")]
    ScenarioIo(#[from] std::io::Error),

    /// A scenario file was not well-formed JSON.
    #[error("scenario is not valid JSON: {0}")]
    ScenarioJson(#[from] serde_json::Error),

    /// The busted probability came out exactly 1, where the threshold
    /// formulas degenerate (the player is forced truthful every round).
    #[error(
        "degenerate reduction: busted probability is 1 at alpha={alpha}; \
         thresholds require it strictly below 1"
    )]
    DegenerateBusted { alpha: f64 },

    /// The requested solve needs more states than the configured cap.
    #[error(
        "state space needs {required} states but the cap is {cap}; \
         raise FLUX_STATE_CAP or shrink the game"
    )]
    StateCapExceeded { required: u64, cap: u64 },

    /// The signal support and report grid are incompatible.
    #[error("report grid incompatible with signal support: {message}")]
    GridMismatch { message: String },

    /// A bisection bracket failed its pre-check.
    #[error("bisection bracket [{lo}, {hi}] does not straddle the switch: {message}")]
    NonBracketing { lo: f64, hi: f64, message: String },

    /// An operation that only works for Bernoulli signals got something else.
    #[error("{context}: requires a Bernoulli signal model")]
    BernoulliRequired { context: &'static str },

    /// A simulation policy produced an infeasible report.
    #[error(
        "player {player} reported {report} below signal {signal} in \
         chronological round {round}"
    )]
    ReportBelowSignal {
        round: u32,
        player: usize,
        report: f64,
        signal: f64,
    },
}

impl FluxError {
    /// Shorthand for [`FluxError::InvalidParameter`].
    pub fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        FluxError::InvalidParameter {
            field,
            message: message.into(),
        }
    }

    /// Process exit code the CLI maps this error to: 2 for computation-cap
    /// failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            FluxError::StateCapExceeded { .. } => 2,
            _ => 1,
        }
    }
}
