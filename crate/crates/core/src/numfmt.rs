//! Number formatting shared by the report writers and the model file.

/// Format a non-negative value with `decimals` places, rounding half-up.
///
/// `format!("{:.2}")` rounds half-to-even, which disagrees with the
/// reported tables on exact midpoints (e.g. 0.775 must display as 0.78).
/// The rounding happens in integer space so the formatted string is exact.
pub(crate) fn fixed_half_up(value: f64, decimals: usize) -> String {
    debug_assert!(value >= 0.0, "display rounding expects non-negative values");
    let factor = 10f64.powi(decimals as i32);
    let scaled = (value * factor + 0.5).floor() as i64;
    if decimals == 0 {
        return scaled.to_string();
    }
    let base = 10i64.pow(decimals as u32);
    format!(
        "{}.{:0width$}",
        scaled / base,
        scaled % base,
        width = decimals
    )
}

/// Serialize a float with 17 significant digits; parses back bit-exact.
pub(crate) fn sig17(value: f64) -> String {
    format!("{value:.16e}")
}
