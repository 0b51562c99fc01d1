//! Display rounding. Arithmetic everywhere else keeps full precision.

/// Rounds half away from zero at `decimals` places (0.775 → 0.78,
/// 0.325 → 0.33, −0.425 → −0.43).
///
/// A tiny nudge (absolute 1e-9 units, or 1e-12 relative for large values) is
/// added before rounding so that binary values sitting just below a half
/// (0.32499999999999996) still round up.
pub fn round_half_up(value: f64, decimals: u32) -> f64 {
    if !value.is_finite() {
        return value;
    }
    let scale = 10f64.powi(decimals as i32);
    let scaled = value * scale;
    let nudge = (scaled.abs() * 1e-12).max(1e-9);
    let rounded = (scaled + nudge.copysign(scaled)).round() / scale;
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

pub fn format_fixed(value: f64, decimals: u32) -> String {
    format!("{:.*}", decimals as usize, round_half_up(value, decimals))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_two_display_values() {
        assert_eq!(format_fixed(0.1 + 0.9 * 0.75, 2), "0.78");
        assert_eq!(format_fixed(0.1 + 0.9 * 0.25, 2), "0.33");
        assert_eq!(format_fixed(1.0, 2), "1.00");
        assert_eq!(format_fixed(0.1, 2), "0.10");
    }

    #[test]
    fn negatives_round_away_from_zero() {
        assert_eq!(format_fixed(-0.425, 2), "-0.43");
        assert_eq!(format_fixed(-0.425, 3), "-0.425");
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(format_fixed(-0.0001, 2), "0.00");
    }

    #[test]
    fn percentages() {
        assert_eq!(format_fixed(2.85 / 3.725 * 100.0, 2), "76.51");
        assert_eq!(format_fixed(0.625 / 2.2 * 100.0, 2), "28.41");
        assert_eq!(format_fixed(11.0 / 31.0 * 100.0, 2), "35.48");
        assert_eq!(format_fixed(18.0 / 31.0 * 100.0, 2), "58.06");
        assert_eq!(format_fixed(35.48387, 0), "35");
    }
}
