//! Alpha-truthfulness: reducing general signal distributions to Bernoulli.
//!
//! Full truthfulness is unattainable at any finite rate for continuous
//! models, so the target weakens to *alpha-truthfulness*: every report at
//! least `alpha * D`. Reports below `alpha * D` count as lies, reports at or
//! above count as truth, and the game collapses to a Bernoulli game whose
//! busted probability is `P(y >= alpha * D)`. Thresholds produced this way
//! are sufficient upper bounds, not exact minima, for non-Bernoulli models.

use crate::error::{FluxError, Result};
use crate::signal::SignalModel;
use crate::single::{check_horizon, truthful_threshold, Threshold};

/// A truthfulness level: the fraction of `D` below which a report counts
/// as a lie. Strictly positive, at most 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaLevel(f64);

impl AlphaLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(FluxError::invalid(
                "alpha",
                format!("must lie in (0, 1], got {alpha}"),
            ));
        }
        Ok(AlphaLevel(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The Bernoulli game equivalent to `model` under alpha-truthful play:
/// busted with probability `P(y >= alpha * D)`, same `D`. Errors when that
/// probability is degenerate (0 or 1).
pub fn reduced_bernoulli(model: &SignalModel, alpha: AlphaLevel) -> Result<SignalModel> {
    let p = model.busted_probability(alpha.value())?;
    if p >= 1.0 {
        return Err(FluxError::DegenerateBusted {
            alpha: alpha.value(),
        });
    }
    if p <= 0.0 {
        return Err(FluxError::invalid(
            "alpha",
            "busted probability is 0; no finite rate enforces this level",
        ));
    }
    SignalModel::bernoulli(p, model.d())
}

/// Rate sufficient for alpha-truthful reporting of `model` over `t_rounds`
/// rounds: the truthful threshold of the reduced Bernoulli game.
/// [`Threshold::Infinite`] when the busted probability is 0 (nothing ever
/// forces a report up); degenerate probability 1 is an error.
pub fn alpha_threshold_single(
    t_rounds: u32,
    model: &SignalModel,
    alpha: AlphaLevel,
) -> Result<Threshold> {
    check_horizon(t_rounds)?;
    let p = model.busted_probability(alpha.value())?;
    if p >= 1.0 {
        return Err(FluxError::DegenerateBusted {
            alpha: alpha.value(),
        });
    }
    if p <= 0.0 {
        return Ok(Threshold::Infinite);
    }
    Ok(Threshold::Finite(truthful_threshold(t_rounds, p)?))
}

/// Closed form of [`alpha_threshold_single`] for the uniform model:
/// `(1 - a^T) / ((1 - a)(1 - a^(T-1)))`, diverging as `alpha -> 1`.
/// Evaluated directly (not through the reduction) so the two routes can be
/// checked against each other.
pub fn uniform_alpha_threshold(t_rounds: u32, alpha: AlphaLevel) -> Result<Threshold> {
    check_horizon(t_rounds)?;
    let a = alpha.value();
    if a == 1.0 {
        return Ok(Threshold::Infinite);
    }
    Ok(Threshold::Finite(
        (1.0 - a.powi(t_rounds as i32))
            / ((1.0 - a) * (1.0 - a.powi(t_rounds as i32 - 1))),
    ))
}

/// Scales a rate that is sufficient at consumption `d_min` up to one
/// sufficient when per-round consumption varies within `[d_min, d_max]`:
/// `rate * d_max / d_min`.
pub fn range_robust_scale(rate: f64, d_min: f64, d_max: f64) -> Result<f64> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(FluxError::invalid(
            "rate",
            format!("must be finite and nonnegative, got {rate}"),
        ));
    }
    if !(d_min > 0.0 && d_min.is_finite()) {
        return Err(FluxError::invalid(
            "d_min",
            format!("must be positive, got {d_min}"),
        ));
    }
    if !(d_max >= d_min && d_max.is_finite()) {
        return Err(FluxError::invalid(
            "d_max",
            format!("must be at least d_min = {d_min}, got {d_max}"),
        ));
    }
    Ok(rate * d_max / d_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn alpha(a: f64) -> AlphaLevel {
        AlphaLevel::new(a).unwrap()
    }

    #[test]
    fn uniform_worked_examples() {
        let model = SignalModel::uniform(1.0).unwrap();
        let got = alpha_threshold_single(2, &model, alpha(0.5)).unwrap();
        assert_eq!(got, Threshold::Finite(3.0));

        let got = uniform_alpha_threshold(2, alpha(0.5)).unwrap().finite().unwrap();
        assert_eq!(got, 3.0);

        let got = uniform_alpha_threshold(10, alpha(0.9)).unwrap().finite().unwrap();
        assert!((got - 10.632).abs() < 5e-4, "got {got}");
    }

    #[test]
    fn bernoulli_models_reduce_to_themselves() {
        let model = SignalModel::bernoulli(0.3, 1.0).unwrap();
        for a in [0.1, 0.5, 1.0] {
            let got = alpha_threshold_single(4, &model, alpha(a)).unwrap();
            assert_eq!(
                got,
                Threshold::Finite(truthful_threshold(4, 0.3).unwrap())
            );
        }
    }

    #[test]
    fn alpha_one_on_continuous_models_is_the_infinity_marker() {
        let model = SignalModel::uniform(2.0).unwrap();
        assert!(alpha_threshold_single(3, &model, alpha(1.0)).unwrap().is_infinite());
        assert!(uniform_alpha_threshold(3, alpha(1.0)).unwrap().is_infinite());
    }

    #[test]
    fn degenerate_busted_probability_is_flagged_distinctly() {
        // All mass at D: every level is always busted.
        let model = SignalModel::empirical(vec![(1.0, 1.0)], 1.0).unwrap();
        let err = alpha_threshold_single(3, &model, alpha(0.5)).unwrap_err();
        assert!(matches!(err, FluxError::DegenerateBusted { .. }));
    }

    #[test]
    fn range_robust_examples_and_rejections() {
        assert_eq!(range_robust_scale(3.0, 1.0, 1.0).unwrap(), 3.0);
        assert_eq!(range_robust_scale(3.0, 1.0, 2.0).unwrap(), 6.0);
        assert_eq!(range_robust_scale(2.0, 2.0, 3.0).unwrap(), 3.0);
        assert!(range_robust_scale(2.0, 0.0, 3.0).is_err());
        assert!(range_robust_scale(2.0, 3.0, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn the_two_uniform_routes_agree(
            t in 2u32..30,
            a in 0.01f64..=0.99,
        ) {
            let model = SignalModel::uniform(1.0).unwrap();
            let via_reduction = alpha_threshold_single(t, &model, alpha(a))
                .unwrap().finite().unwrap();
            let closed_form = uniform_alpha_threshold(t, alpha(a))
                .unwrap().finite().unwrap();
            prop_assert!(
                (via_reduction - closed_form).abs() <= 1e-12 * closed_form,
                "{via_reduction} vs {closed_form}"
            );
        }

        #[test]
        fn uniform_thresholds_fall_as_the_bar_lowers(
            t in 2u32..20,
            lo in 0.01f64..=0.98,
            step in 0.001f64..=0.01,
        ) {
            let model = SignalModel::uniform(1.0).unwrap();
            let hi = (lo + step).min(0.99);
            let at_lo = alpha_threshold_single(t, &model, alpha(lo)).unwrap().finite().unwrap();
            let at_hi = alpha_threshold_single(t, &model, alpha(hi)).unwrap().finite().unwrap();
            prop_assert!(at_lo <= at_hi + 1e-12);
        }

        #[test]
        fn range_robust_is_monotone(
            rate in 0.0f64..10.0,
            d_min in 0.1f64..=5.0,
            grow in 1.0f64..=4.0,
        ) {
            let d_max = d_min * grow;
            let scaled = range_robust_scale(rate, d_min, d_max).unwrap();
            prop_assert!(scaled >= rate - 1e-12);
            let wider = range_robust_scale(rate, d_min, d_max * 1.5).unwrap();
            prop_assert!(wider >= scaled - 1e-12);
            let tighter = range_robust_scale(rate, d_min * 0.5, d_max).unwrap();
            prop_assert!(tighter >= scaled - 1e-12);
        }
    }
}
