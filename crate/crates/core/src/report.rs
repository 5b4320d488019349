//! Plain-text number formatting shared by the CSV writers.

/// Format with 9 significant digits, `%g` style: fixed notation for
/// moderate magnitudes, scientific otherwise, trailing zeros stripped.
pub fn fmt_float(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Quote a CSV field if it contains a delimiter, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(-2.5), "-2.5");
        assert_eq!(fmt_float(0.259181779318282), "0.259181779");
        assert_eq!(fmt_float(123456789.0), "123456789");
        assert_eq!(fmt_float(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_float(1.0e-5), "1e-05");
        assert_eq!(fmt_float(1.25e-6), "1.25e-06");
        assert_eq!(fmt_float(0.0001), "0.0001");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(f64::NAN), "nan");
        // Rounding that carries into a new digit.
        assert_eq!(fmt_float(9.9999999999), "10");
    }

    #[test]
    fn round_trips_to_nine_digits() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 6.02214076e23, 2.0e-300, 0.000123456789123] {
            let back: f64 = fmt_float(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-8, "{x}");
        }
    }

    #[test]
    fn quoting() {
        assert_eq!(csv_field("abc"), "abc");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
