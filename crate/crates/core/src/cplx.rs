//! Complex helpers: the `a+bi` wire format, integer powers by repeated
//! multiplication, and arguments in `[0, 2pi)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{LabError, Result};

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `z^k` by repeated multiplication (binary powering). Never goes through
/// `exp(k log z)`, so there is no branch cut.
pub fn powi(z: C64, k: u32) -> C64 {
    let mut base = z;
    let mut exp = k;
    let mut acc = C64::new(1.0, 0.0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// Argument of `z` in `[0, 2pi)`.
pub fn arg_2pi(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        let shifted = a + 2.0 * PI;
        // atan2 can return -0.0 or a value that rounds to 2pi after shifting
        if shifted >= 2.0 * PI {
            0.0
        } else {
            shifted
        }
    } else {
        a
    }
}

/// `e^{i theta}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Parse `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` with optional spaces and
/// scientific notation (`1e-3+2.5e2i`). `j` is accepted in place of `i`.
pub fn parse_complex(input: &str) -> Result<C64> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(LabError::Parse("empty complex literal".into()));
    }
    let bad = || LabError::Parse(format!("cannot parse complex number '{input}'"));

    let body = s.as_str();
    let imaginary = body.ends_with('i') || body.ends_with('j');
    if !imaginary {
        let re: f64 = body.parse().map_err(|_| bad())?;
        return Ok(C64::new(re, 0.0));
    }
    let body = &body[..body.len() - 1];

    // Find the sign separating real and imaginary parts: the last '+' or '-'
    // that is not at position 0 and not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let ch = bytes[idx];
        if (ch == b'+' || ch == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let parse_im = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(idx) => {
            let re: f64 = body[..idx].parse().map_err(|_| bad())?;
            let im = parse_im(&body[idx..])?;
            Ok(C64::new(re, im))
        }
        None => Ok(C64::new(0.0, parse_im(body)?)),
    }
}

/// Format with 17 significant digits, in the same `a+bi` wire format.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", fmt_f64(z.re), sign, fmt_f64(z.im.abs()))
}

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Relative error `|a - b| / max(|b|, tiny)`.
pub fn rel_err(a: C64, b: C64) -> f64 {
    let denom = b.norm().max(f64::MIN_POSITIVE);
    (a - b).norm() / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::approx_constant)]
    fn parses_common_forms() {
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1 - 2i").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex("-3").unwrap(), c(-3.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2.5i").unwrap(), c(0.0, 2.5));
        assert_eq!(parse_complex("1e-3+2.5e2i").unwrap(), c(1e-3, 250.0));
        assert_eq!(parse_complex("-1e+2-1E-1i").unwrap(), c(-100.0, -0.1));
        assert_eq!(parse_complex("0.7071+0.7071i").unwrap(), c(0.7071, 0.7071));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_complex("").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("1+xi").is_err());
    }

    #[test]
    fn powi_matches_polar_power() {
        let z = 1.3 * cis(0.3);
        for k in 0..12u32 {
            let expect = z.norm().powi(k as i32) * cis(0.3 * k as f64);
            assert!(rel_err(powi(z, k), expect) < 1e-13);
        }
    }

    #[test]
    fn arg_range() {
        assert_eq!(arg_2pi(c(1.0, 0.0)), 0.0);
        assert!((arg_2pi(c(0.0, -1.0)) - 1.5 * PI).abs() < 1e-15);
        assert!(arg_2pi(c(1.0, -1e-300)) < 2.0 * PI);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn format_round_trips() {
        let z = c(-0.1234567890123456789, 3.0e-17);
        let back = parse_complex(&format_complex(z)).unwrap();
        assert_eq!(back, z);
    }
}
