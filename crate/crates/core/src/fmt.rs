//! Number formatting shared by the CSV and text writers.

/// Formats `x` with `digits` significant digits, like C's `%.{digits}g`:
/// plain notation for moderate exponents, scientific otherwise, trailing
/// zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig(0.0, 12), "0");
        assert_eq!(sig(1.0, 12), "1");
        assert_eq!(sig(-0.98, 12), "-0.98");
        assert_eq!(sig(25f64.log2(), 12), "4.64385618977");
        assert_eq!(sig(1e-3, 12), "0.001");
        assert_eq!(sig(1.5e-7, 12), "1.5e-07");
        assert_eq!(sig(1234567890123.0, 12), "1.23456789012e+12");
        assert_eq!(sig(1000.0, 12), "1000");
        assert_eq!(sig(0.1 + 0.2, 12), "0.3");
    }
}
