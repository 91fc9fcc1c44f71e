//! CSV formatting with a fixed number of significant digits, so output
//! diffs are reproducible.

use std::io::{self, Write};

/// Significant digits used for every float written to CSV.
pub const CSV_DIGITS: usize = 12;

/// Formats like C's `%.{digits}g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros trimmed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt(x: f64) -> String {
    format_sig(x, CSV_DIGITS)
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// Writes a header line and rows of pre-formatted cells.
pub fn write_csv<W: Write>(mut out: W, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig(std::f64::consts::PI, 12), "3.14159265359");
        assert_eq!(format_sig(0.5, 12), "0.5");
        assert_eq!(format_sig(-2.0, 12), "-2");
        assert_eq!(format_sig(1234.5, 3), "1.23e3");
        assert_eq!(format_sig(1.0e-7, 12), "1e-7");
        assert_eq!(format_sig(0.000123456, 3), "0.000123");
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(f64::INFINITY, 12), "inf");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,2\n");
    }
}
