//! Number formatting shared by the machine-readable exports.
//!
//! Machine formats carry 17 significant digits; human tables carry 6.

use serde_json::Value;

/// `x` with 17 significant digits in scientific notation.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// `x` with 6 significant digits, for human-readable tables.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if a == 0.0 {
        return "0".into();
    }
    if !(1e-4..1e6).contains(&a) {
        return format!("{x:.5e}");
    }
    let digits = a.log10().floor() as i32;
    let decimals = (5 - digits).max(0) as usize;
    format!("{x:.decimals$}")
}

/// A JSON number carrying the 17-digit text form; non-finite values become `null`.
pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    serde_json::from_str(&sig17(x)).expect("formatted float is valid JSON")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI.powi(3) / 6.0, -2.5e-300, 0.0] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(serde_json::to_string(&json_f64(0.5)).unwrap(), "5.0000000000000000e-1");
        assert_eq!(json_f64(f64::NAN), Value::Null);
    }

    #[test]
    fn six_digits() {
        assert_eq!(sig6(1.23456789), "1.23457");
        assert_eq!(sig6(1234.56789), "1234.57");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(1.5e-9), "1.50000e-9");
        assert_eq!(sig6(0.0), "0");
    }
}
