//! C ABI over the flux-core closed forms: opaque signal-model handles,
//! status-code returns, values through out-parameters.
//!
//! Every function returns a [`FluxStatus`]. Out-parameters are written only
//! on `FLUX_STATUS_OK`, with one exception: a threshold query whose answer
//! has no finite value writes positive infinity and returns
//! `FLUX_STATUS_INFINITE_THRESHOLD`, so callers that treat infinity as an
//! ordinary rate can ignore the distinction. Null pointers are reported,
//! never dereferenced. The matching C header is generated into
//! `include/flux.h` at build time.

use flux_core::multi::{dse_threshold, ne_threshold};
use flux_core::reduction::{
    alpha_threshold_single, range_robust_scale, uniform_alpha_threshold, AlphaLevel,
};
use flux_core::signal::SignalModel;
use flux_core::single::{
    classify_strategy, history_threshold, truthful_threshold, StrategyClass, Threshold,
};

/// Result of every call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxStatus {
    /// The call succeeded and its out-parameters are valid.
    Ok = 0,
    /// A required pointer argument was null; nothing was written.
    NullPointer = 1,
    /// A parameter violated its documented range or relationship.
    InvalidArgument = 2,
    /// The requested threshold has no finite value; the out slot holds
    /// positive infinity.
    InfiniteThreshold = 3,
}

/// The optimal-play regimes of the single-player game, mirrored as plain
/// C enum values. `MixedLieFirst` carries its round count through the
/// separate `lie_rounds` out-parameter of [`flux_classify_strategy`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxStrategyClass {
    LyingTillEnd = 0,
    LyingTillBustedPlusLieLastRound = 1,
    LyingTillBusted = 2,
    HonestTillEnd = 3,
    MixedLieFirst = 4,
}

/// Opaque signal-model handle. Create with one of the
/// `flux_signal_model_*` constructors, release with
/// [`flux_signal_model_free`].
pub struct FluxSignalModel {
    inner: SignalModel,
}

unsafe fn write_value(out: *mut f64, value: f64) -> FluxStatus {
    *out = value;
    FluxStatus::Ok
}

unsafe fn write_threshold(out: *mut f64, threshold: Threshold) -> FluxStatus {
    match threshold {
        Threshold::Finite(x) => write_value(out, x),
        Threshold::Infinite => {
            *out = f64::INFINITY;
            FluxStatus::InfiniteThreshold
        }
    }
}

unsafe fn new_model(
    model: flux_core::error::Result<SignalModel>,
    out: *mut *mut FluxSignalModel,
) -> FluxStatus {
    match model {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(FluxSignalModel { inner }));
            FluxStatus::Ok
        }
        Err(_) => FluxStatus::InvalidArgument,
    }
}

/// Creates a two-point signal model: consumption `d` with probability `p`,
/// zero otherwise.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn flux_signal_model_bernoulli(
    p: f64,
    d: f64,
    out: *mut *mut FluxSignalModel,
) -> FluxStatus {
    if out.is_null() {
        return FluxStatus::NullPointer;
    }
    new_model(SignalModel::bernoulli(p, d), out)
}

/// Creates a uniform signal model on `[0, d]`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn flux_signal_model_uniform(
    d: f64,
    out: *mut *mut FluxSignalModel,
) -> FluxStatus {
    if out.is_null() {
        return FluxStatus::NullPointer;
    }
    new_model(SignalModel::uniform(d), out)
}

/// Creates an empirical signal model from `len` parallel `(value, weight)`
/// entries; weights must sum to one and values must lie in `[0, d]`.
///
/// # Safety
/// `values` and `weights` must be null or valid for reading `len` doubles;
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn flux_signal_model_empirical(
    values: *const f64,
    weights: *const f64,
    len: usize,
    d: f64,
    out: *mut *mut FluxSignalModel,
) -> FluxStatus {
    if out.is_null() || values.is_null() || weights.is_null() {
        return FluxStatus::NullPointer;
    }
    let values = std::slice::from_raw_parts(values, len);
    let weights = std::slice::from_raw_parts(weights, len);
    let points = values.iter().copied().zip(weights.iter().copied()).collect();
    new_model(SignalModel::empirical(points, d), out)
}

/// Releases a model created by the constructors above. Null is a no-op.
///
/// # Safety
/// `model` must be null or a pointer returned by a `flux_signal_model_*`
/// constructor that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn flux_signal_model_free(model: *mut FluxSignalModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Probability that a signal reaches `alpha` times the model's consumption,
/// i.e. the chance a report below that bar is caught.
///
/// # Safety
/// `model` must be a live handle or null; `out` must be null or valid for
/// writing one double.
#[no_mangle]
pub unsafe extern "C" fn flux_busted_probability(
    model: *const FluxSignalModel,
    alpha: f64,
    out: *mut f64,
) -> FluxStatus {
    if model.is_null() || out.is_null() {
        return FluxStatus::NullPointer;
    }
    match (*model).inner.busted_probability(alpha) {
        Ok(value) => write_value(out, value),
        Err(_) => FluxStatus::InvalidArgument,
    }
}

/// Minimum penalty rate making honest reporting optimal from the first of
/// `t_rounds` rounds against a two-point signal with busted probability `p`.
///
/// # Safety
/// `out` must be null or valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn flux_truthful_threshold(
    t_rounds: u32,
    p: f64,
    out: *mut f64,
) -> FluxStatus {
    if out.is_null() {
        return FluxStatus::NullPointer;
    }
    match truthful_threshold(t_rounds, p) {
        Ok(value) => write_value(out, value),
        Err(_) => FluxStatus::InvalidArgument,
    }
}

/// Minimum penalty rate making it optimal to keep a full report alive with
/// `rounds_left` rounds remaining.
///
/// # Safety
/// `out` must be null or valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn flux_history_threshold(
    rounds_left: u32,
    p: f64,
    out: *mut f64,
) -> FluxStatus {
    if out.is_null() {
        return FluxStatus::NullPointer;
    }
    match history_threshold(rounds_left, p) {
        Ok(value) => write_value(out, value),
        Err(_) => FluxStatus::InvalidArgument,
    }
}

/// Penalty rate under which every report stays at or above `alpha` times
/// consumption, for an arbitrary signal model. Writes infinity and returns
/// `FLUX_STATUS_INFINITE_THRESHOLD` when no finite rate suffices.
///
/// # Safety
/// `model` must be a live handle or null; `out` must be null or valid for
/// writing one double.
#[no_mangle]
pub unsafe extern "C" fn flux_alpha_threshold(
    model: *const FluxSignalModel,
    t_rounds: u32,
    alpha: f64,
    out: *mut f64,
) -> FluxStatus {
    if model.is_null() || out.is_null() {
        return FluxStatus::NullPointer;
    }
    let level = match AlphaLevel::new(alpha) {
        Ok(level) => level,
        Err(_) => return FluxStatus::InvalidArgument,
    };
    match alpha_threshold_single(t_rounds, &(*model).inner, level) {
        Ok(threshold) => write_threshold(out, threshold),
        Err(_) => FluxStatus::InvalidArgument,
    }
}

/// Closed form of [`flux_alpha_threshold`] for the uniform model.
///
/// # Safety
/// `out` must be null or valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn flux_uniform_alpha_threshold(
    t_rounds: u32,
    alpha: f64,
    out: *mut f64,
) -> FluxStatus {
    if out.is_null() {
        return FluxStatus::NullPointer;
    }
    let level = match AlphaLevel::new(alpha) {
        Ok(level) => level,
        Err(_) => return FluxStatus::InvalidArgument,
    };
    match uniform_alpha_threshold(t_rounds, level) {
        Ok(threshold) => write_threshold(out, threshold),
        Err(_) => FluxStatus::InvalidArgument,
    }
}

/// Minimum penalty rate making all-truthful a Nash equilibrium of the
/// `n`-player cost-sharing game with overhead `c` and consumption `d`.
///
/// # Safety
/// `out` must be null or valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn flux_ne_threshold(
    t_rounds: u32,
    p: f64,
    n: u32,
    c: f64,
    d: f64,
    out: *mut f64,
) -> FluxStatus {
    if out.is_null() {
        return FluxStatus::NullPointer;
    }
    match ne_threshold(t_rounds, p, n as usize, c, d) {
        Ok(value) => write_value(out, value),
        Err(_) => FluxStatus::InvalidArgument,
    }
}

/// Minimum penalty rate making all-truthful a dominant-strategy equilibrium
/// of the `n`-player cost-sharing game.
///
/// # Safety
/// `out` must be null or valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn flux_dse_threshold(
    t_rounds: u32,
    p: f64,
    n: u32,
    c: f64,
    d: f64,
    out: *mut f64,
) -> FluxStatus {
    if out.is_null() {
        return FluxStatus::NullPointer;
    }
    match dse_threshold(t_rounds, p, n as usize, c, d) {
        Ok(value) => write_value(out, value),
        Err(_) => FluxStatus::InvalidArgument,
    }
}

/// Optimal single-player strategy class at rate `r`. When the class is
/// `FLUX_STRATEGY_CLASS_MIXED_LIE_FIRST`, `lie_rounds` receives the number
/// of leading rounds spent lying; otherwise it receives zero.
///
/// # Safety
/// `class_out` and `lie_rounds_out` must each be null or valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn flux_classify_strategy(
    t_rounds: u32,
    p: f64,
    r: f64,
    class_out: *mut FluxStrategyClass,
    lie_rounds_out: *mut u32,
) -> FluxStatus {
    if class_out.is_null() || lie_rounds_out.is_null() {
        return FluxStatus::NullPointer;
    }
    let class = match classify_strategy(t_rounds, p, r) {
        Ok(class) => class,
        Err(_) => return FluxStatus::InvalidArgument,
    };
    let (code, lie_rounds) = match class {
        StrategyClass::LyingTillEnd => (FluxStrategyClass::LyingTillEnd, 0),
        StrategyClass::LyingTillBustedPlusLieLastRound => {
            (FluxStrategyClass::LyingTillBustedPlusLieLastRound, 0)
        }
        StrategyClass::LyingTillBusted => (FluxStrategyClass::LyingTillBusted, 0),
        StrategyClass::HonestTillEnd => (FluxStrategyClass::HonestTillEnd, 0),
        StrategyClass::MixedLieFirst { lie_rounds } => {
            (FluxStrategyClass::MixedLieFirst, lie_rounds)
        }
    };
    *class_out = code;
    *lie_rounds_out = lie_rounds;
    FluxStatus::Ok
}

/// Scales a rate that is sufficient at consumption `d_min` up to one that
/// stays sufficient when per-round consumption varies within
/// `[d_min, d_max]`.
///
/// # Safety
/// `out` must be null or valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn flux_range_robust_scale(
    rate: f64,
    d_min: f64,
    d_max: f64,
    out: *mut f64,
) -> FluxStatus {
    if out.is_null() {
        return FluxStatus::NullPointer;
    }
    match range_robust_scale(rate, d_min, d_max) {
        Ok(value) => write_value(out, value),
        Err(_) => FluxStatus::InvalidArgument,
    }
}
