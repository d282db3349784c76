//! Fixed-point text formatting shared by the CSV exporters.

/// Digits after the decimal point in every exported real number.
pub const DECIMALS: usize = 7;

/// Formats `x` with [`DECIMALS`] digits, printing negative zero as zero.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.DECIMALS$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_seven_places() {
        assert_eq!(fixed(0.70710678118), "0.7071068");
        assert_eq!(fixed(-0.0012438), "-0.0012438");
        assert_eq!(fixed(1.0), "1.0000000");
        assert_eq!(fixed(-0.0), "0.0000000");
        assert_eq!(fixed(-1e-9), "0.0000000");
    }
}
