//! Exercises the C ABI end to end: status codes, null handling, handle
//! lifecycle, and agreement with the underlying library.

use std::ptr;

use flux_ffi::*;

fn threshold_of(t_rounds: u32, p: f64) -> f64 {
    let mut out = f64::NAN;
    let status = unsafe { flux_truthful_threshold(t_rounds, p, &mut out) };
    assert_eq!(status, FluxStatus::Ok);
    out
}

#[test]
fn truthful_threshold_matches_the_library() {
    assert_eq!(threshold_of(2, 0.5), 3.0);
    assert_eq!(
        threshold_of(5, 0.3),
        flux_core::single::truthful_threshold(5, 0.3).unwrap()
    );
}

#[test]
fn invalid_parameters_are_reported_not_written() {
    let mut out = 42.0;
    let status = unsafe { flux_truthful_threshold(1, 0.5, &mut out) };
    assert_eq!(status, FluxStatus::InvalidArgument);
    assert_eq!(out, 42.0);

    let status = unsafe { flux_truthful_threshold(3, 1.5, &mut out) };
    assert_eq!(status, FluxStatus::InvalidArgument);
    assert_eq!(out, 42.0);
}

#[test]
fn null_out_pointers_are_rejected() {
    unsafe {
        assert_eq!(
            flux_truthful_threshold(2, 0.5, ptr::null_mut()),
            FluxStatus::NullPointer
        );
        assert_eq!(
            flux_history_threshold(2, 0.5, ptr::null_mut()),
            FluxStatus::NullPointer
        );
        assert_eq!(
            flux_signal_model_bernoulli(0.5, 1.0, ptr::null_mut()),
            FluxStatus::NullPointer
        );
        let mut out = 0.0;
        assert_eq!(
            flux_busted_probability(ptr::null(), 0.5, &mut out),
            FluxStatus::NullPointer
        );
        let mut class = FluxStrategyClass::HonestTillEnd;
        assert_eq!(
            flux_classify_strategy(3, 0.5, 1.0, &mut class, ptr::null_mut()),
            FluxStatus::NullPointer
        );
        // Freeing null is defined as a no-op.
        flux_signal_model_free(ptr::null_mut());
    }
}

#[test]
fn model_handles_create_query_and_free() {
    unsafe {
        let mut model: *mut FluxSignalModel = ptr::null_mut();
        assert_eq!(
            flux_signal_model_uniform(1.0, &mut model),
            FluxStatus::Ok
        );
        assert!(!model.is_null());
        let mut prob = f64::NAN;
        assert_eq!(
            flux_busted_probability(model, 0.25, &mut prob),
            FluxStatus::Ok
        );
        assert_eq!(prob, 0.75);
        assert_eq!(
            flux_busted_probability(model, 1.5, &mut prob),
            FluxStatus::InvalidArgument
        );
        flux_signal_model_free(model);

        let mut bad: *mut FluxSignalModel = ptr::null_mut();
        assert_eq!(
            flux_signal_model_bernoulli(1.5, 1.0, &mut bad),
            FluxStatus::InvalidArgument
        );
        assert!(bad.is_null());
    }
}

#[test]
fn empirical_models_read_parallel_arrays() {
    let values = [0.0, 0.5, 1.0];
    let weights = [0.2, 0.3, 0.5];
    unsafe {
        let mut model: *mut FluxSignalModel = ptr::null_mut();
        assert_eq!(
            flux_signal_model_empirical(
                values.as_ptr(),
                weights.as_ptr(),
                values.len(),
                1.0,
                &mut model,
            ),
            FluxStatus::Ok
        );
        let mut prob = f64::NAN;
        assert_eq!(
            flux_busted_probability(model, 0.5, &mut prob),
            FluxStatus::Ok
        );
        assert_eq!(prob, 0.8);
        flux_signal_model_free(model);

        assert_eq!(
            flux_signal_model_empirical(
                ptr::null(),
                weights.as_ptr(),
                weights.len(),
                1.0,
                &mut model,
            ),
            FluxStatus::NullPointer
        );
    }
}

#[test]
fn infinite_thresholds_get_their_own_status() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(
            flux_uniform_alpha_threshold(2, 0.5, &mut out),
            FluxStatus::Ok
        );
        assert_eq!(out, 3.0);
        assert_eq!(
            flux_uniform_alpha_threshold(2, 1.0, &mut out),
            FluxStatus::InfiniteThreshold
        );
        assert!(out.is_infinite() && out > 0.0);

        let mut model: *mut FluxSignalModel = ptr::null_mut();
        assert_eq!(flux_signal_model_uniform(2.0, &mut model), FluxStatus::Ok);
        assert_eq!(
            flux_alpha_threshold(model, 2, 1.0, &mut out),
            FluxStatus::InfiniteThreshold
        );
        assert!(out.is_infinite());
        assert_eq!(
            flux_alpha_threshold(model, 2, 0.5, &mut out),
            FluxStatus::Ok
        );
        assert_eq!(out, 3.0);
        flux_signal_model_free(model);
    }
}

#[test]
fn equilibrium_thresholds_match_the_library() {
    let mut ne = 0.0;
    let mut dse = 0.0;
    unsafe {
        assert_eq!(
            flux_ne_threshold(10, 2.0 / 3.0, 20, 20.0, 1.0, &mut ne),
            FluxStatus::Ok
        );
        assert_eq!(
            flux_dse_threshold(10, 2.0 / 3.0, 20, 20.0, 1.0, &mut dse),
            FluxStatus::Ok
        );
    }
    assert_eq!(
        ne,
        flux_core::multi::ne_threshold(10, 2.0 / 3.0, 20, 20.0, 1.0).unwrap()
    );
    assert_eq!(
        dse,
        flux_core::multi::dse_threshold(10, 2.0 / 3.0, 20, 20.0, 1.0).unwrap()
    );
    assert!(dse > ne);

    let mut out = 0.0;
    let status = unsafe { flux_ne_threshold(3, 0.5, 2, 1.0, 1.0, &mut out) };
    assert_eq!(status, FluxStatus::InvalidArgument, "C below n*D");
}

#[test]
fn classification_codes_cover_every_regime() {
    let mut class = FluxStrategyClass::LyingTillEnd;
    let mut lie_rounds = 99;
    unsafe {
        assert_eq!(
            flux_classify_strategy(5, 0.3, 4.0, &mut class, &mut lie_rounds),
            FluxStatus::Ok
        );
        assert_eq!(class, FluxStrategyClass::HonestTillEnd);
        assert_eq!(lie_rounds, 0);

        assert_eq!(
            flux_classify_strategy(5, 0.3, 0.5, &mut class, &mut lie_rounds),
            FluxStatus::Ok
        );
        assert_eq!(class, FluxStrategyClass::LyingTillEnd);

        assert_eq!(
            flux_classify_strategy(5, 0.3, 1.2, &mut class, &mut lie_rounds),
            FluxStatus::Ok
        );
        assert_eq!(class, FluxStrategyClass::MixedLieFirst);
        assert_eq!(lie_rounds, 4);

        assert_eq!(
            flux_classify_strategy(5, 0.3, 0.0, &mut class, &mut lie_rounds),
            FluxStatus::Ok
        );
        assert_eq!(class, FluxStrategyClass::LyingTillEnd);
    }
}

#[test]
fn range_robust_scaling_goes_through() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(
            flux_range_robust_scale(3.0, 1.0, 2.0, &mut out),
            FluxStatus::Ok
        );
        assert_eq!(out, 6.0);
        assert_eq!(
            flux_range_robust_scale(3.0, 2.0, 1.0, &mut out),
            FluxStatus::InvalidArgument
        );
    }
}

#[test]
fn generated_header_exposes_the_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/flux.h"
    ))
    .expect("the build script generates include/flux.h");
    for symbol in [
        "FluxStatus",
        "FluxStrategyClass",
        "struct FluxSignalModel",
        "flux_signal_model_bernoulli",
        "flux_signal_model_uniform",
        "flux_signal_model_empirical",
        "flux_signal_model_free",
        "flux_busted_probability",
        "flux_truthful_threshold",
        "flux_history_threshold",
        "flux_alpha_threshold",
        "flux_uniform_alpha_threshold",
        "flux_ne_threshold",
        "flux_dse_threshold",
        "flux_classify_strategy",
        "flux_range_robust_scale",
        "FLUX_STATUS_INFINITE_THRESHOLD",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
}
