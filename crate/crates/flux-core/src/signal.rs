//! Signal models: the per-round demand distributions players observe.
//!
//! Each round a player's true need `y` is drawn fresh from the model. `D`
//! (the gross consumption) is both the largest possible signal and the
//! truthful report. The *busted probability* at level `alpha` is
//! `P(y >= alpha * D)`, inclusive: a signal at least `alpha * D` forces any
//! alpha-truthful report up to at least that level. The inclusive form is
//! what makes `alpha = 1` meaningful for distributions with an atom at `D`.

use rand::Rng;

use crate::error::{FluxError, Result};

/// One observed per-round demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signal {
    pub value: f64,
}

/// Distribution of the per-round signal on `[0, D]`.
///
/// Values are immutable once constructed; share them freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalModel {
    /// `y = D` with probability `p`, else `y = 0`.
    Bernoulli { p: f64, d: f64 },
    /// `y` uniform on `[0, D]`, handled in closed form (no discretization).
    Uniform { d: f64 },
    /// Finite support: `(value, probability)` pairs, strictly increasing in
    /// value, probabilities normalized to sum to 1.
    DiscreteEmpirical { points: Vec<(f64, f64)>, d: f64 },
}

impl SignalModel {
    /// Bernoulli model: busted (signal `d`) with probability `p`.
    pub fn bernoulli(p: f64, d: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(FluxError::invalid(
                "p",
                format!("busted probability must lie strictly in (0, 1), got {p}"),
            ));
        }
        check_d(d)?;
        Ok(SignalModel::Bernoulli { p, d })
    }

    /// Uniform model on `[0, d]`.
    pub fn uniform(d: f64) -> Result<Self> {
        check_d(d)?;
        Ok(SignalModel::Uniform { d })
    }

    /// Finite-support model from `(value, weight)` pairs. Weights must be
    /// positive and are normalized; values must be distinct, within
    /// `[0, d]`, and are sorted ascending.
    pub fn empirical(mut points: Vec<(f64, f64)>, d: f64) -> Result<Self> {
        check_d(d)?;
        if points.is_empty() {
            return Err(FluxError::invalid("points", "need at least one support point"));
        }
        for &(v, w) in &points {
            if !v.is_finite() || !(0.0..=d).contains(&v) {
                return Err(FluxError::invalid(
                    "points",
                    format!("support value {v} outside [0, {d}]"),
                ));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(FluxError::invalid(
                    "points",
                    format!("weight {w} for value {v} must be positive"),
                ));
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(FluxError::invalid("points", "duplicate support values"));
        }
        let total: f64 = points.iter().map(|&(_, w)| w).sum();
        for (_, w) in &mut points {
            *w /= total;
        }
        Ok(SignalModel::DiscreteEmpirical { points, d })
    }

    /// Uniform on `[0, d]` discretized to `levels` evenly spaced atoms
    /// (0, d/(levels-1), ..., d), each with equal weight.
    pub fn discretized_uniform(d: f64, levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(FluxError::invalid("levels", "need at least two levels"));
        }
        let step = d / (levels - 1) as f64;
        let points = (0..levels)
            .map(|i| (step * i as f64, 1.0))
            .collect();
        SignalModel::empirical(points, d)
    }

    /// Gross consumption `D`: the maximum possible signal and the truthful
    /// report.
    pub fn d(&self) -> f64 {
        match *self {
            SignalModel::Bernoulli { d, .. }
            | SignalModel::Uniform { d }
            | SignalModel::DiscreteEmpirical { d, .. } => d,
        }
    }

    /// The Bernoulli parameter, if this is a Bernoulli model.
    pub fn bernoulli_p(&self) -> Option<f64> {
        match *self {
            SignalModel::Bernoulli { p, .. } => Some(p),
            _ => None,
        }
    }

    /// `P(y >= alpha * D)`, inclusive. `alpha` must lie in `[0, 1]`;
    /// `alpha = 0` always yields 1.
    pub fn busted_probability(&self, alpha: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(FluxError::invalid(
                "alpha",
                format!("level must lie in [0, 1], got {alpha}"),
            ));
        }
        Ok(match *self {
            SignalModel::Bernoulli { p, .. } => {
                if alpha == 0.0 {
                    1.0
                } else {
                    p
                }
            }
            SignalModel::Uniform { d } => {
                // P(y >= alpha d) = 1 - alpha; the atomless endpoint makes
                // the inclusive/exclusive distinction vacuous here.
                let _ = d;
                1.0 - alpha
            }
            SignalModel::DiscreteEmpirical { ref points, d } => {
                let cutoff = alpha * d;
                // Points are sorted ascending. When every atom clears the
                // cutoff the mass is 1 by construction; return it exactly
                // instead of a rounded sum of normalized weights.
                if cutoff <= points[0].0 {
                    1.0
                } else {
                    points
                        .iter()
                        .filter(|&&(v, _)| v >= cutoff)
                        .map(|&(_, w)| w)
                        .sum()
                }
            }
        })
    }

    /// Draws one signal from the model.
    pub fn sample(&self, rng: &mut impl Rng) -> Signal {
        let u: f64 = rng.random();
        let value = match *self {
            SignalModel::Bernoulli { p, d } => {
                if u < p {
                    d
                } else {
                    0.0
                }
            }
            SignalModel::Uniform { d } => u * d,
            SignalModel::DiscreteEmpirical { ref points, .. } => {
                let mut acc = 0.0;
                let mut chosen = points[points.len() - 1].0;
                for &(v, w) in points {
                    acc += w;
                    if u < acc {
                        chosen = v;
                        break;
                    }
                }
                chosen
            }
        };
        Signal { value }
    }

    /// The finite support, ascending, or `None` for continuous models.
    pub fn support(&self) -> Option<Vec<f64>> {
        match *self {
            SignalModel::Bernoulli { d, .. } => Some(vec![0.0, d]),
            SignalModel::Uniform { .. } => None,
            SignalModel::DiscreteEmpirical { ref points, .. } => {
                Some(points.iter().map(|&(v, _)| v).collect())
            }
        }
    }

    /// Support paired with probabilities, or `None` for continuous models.
    pub fn support_distribution(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            SignalModel::Bernoulli { p, d } => Some(vec![(0.0, 1.0 - p), (d, p)]),
            SignalModel::Uniform { .. } => None,
            SignalModel::DiscreteEmpirical { ref points, .. } => Some(points.clone()),
        }
    }

    /// Short human-readable description used in CSV comment blocks.
    pub fn describe(&self) -> String {
        match *self {
            SignalModel::Bernoulli { p, d } => format!("bernoulli(p={p}, d={d})"),
            SignalModel::Uniform { d } => format!("uniform(0, {d})"),
            SignalModel::DiscreteEmpirical { ref points, d } => {
                format!("empirical({} points, d={d})", points.len())
            }
        }
    }
}

fn check_d(d: f64) -> Result<()> {
    if !(d.is_finite() && d > 0.0) {
        return Err(FluxError::invalid(
            "d",
            format!("gross consumption must be positive and finite, got {d}"),
        ));
    }
    Ok(())
}
