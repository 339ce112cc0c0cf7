//! Fixed-format decimal output with nine significant digits.
//!
//! All CSV and CLI numbers go through [`sig9`] so that emitted files are
//! byte-identical across runs of the same build.

/// Formats `x` as fixed-point decimal with nine significant digits:
/// `decimals = max(0, 8 - floor(log10 |x|))`. Non-finite values map to
/// `inf` / `-inf` / `nan`; zero prints as `0.00000000`.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    let decimals = (8 - exponent(x.abs())).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Decimal exponent e with 10^e <= m < 10^{e+1}, corrected against the
/// rounding wobble of `log10` at exact powers of ten.
fn exponent(m: f64) -> i32 {
    let mut e = m.log10().floor() as i32;
    if pow10(e + 1) <= m {
        e += 1;
    } else if pow10(e) > m {
        e -= 1;
    }
    e
}

fn pow10(e: i32) -> f64 {
    10f64.powi(e)
}
