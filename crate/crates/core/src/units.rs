//! SI unit constants and the unit-suffix grammar used at the I/O boundary.
//!
//! Every quantity inside the crate is stored in SI (metres, seconds,
//! pascals). Micrometres, minutes and bar only appear when parsing recipes
//! and formatting reports.

pub const UM: f64 = 1e-6;
pub const NM: f64 = 1e-9;
pub const MM: f64 = 1e-3;
pub const MIN: f64 = 60.0;
pub const MPA: f64 = 1e6;
pub const GPA: f64 = 1e9;
pub const BAR: f64 = 1e5;
pub const MBAR: f64 = 100.0;

/// Physical dimension of a recipe quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Dimensionless,
    Length,
    Area,
    Time,
    Pressure,
    Velocity,
}

impl Dimension {
    /// Unit used when this dimension is written to reports.
    pub fn display_unit(self) -> &'static str {
        match self {
            Dimension::Dimensionless => "1",
            Dimension::Length => "um",
            Dimension::Area => "um2",
            Dimension::Time => "min",
            Dimension::Pressure => "MPa",
            Dimension::Velocity => "um/min",
        }
    }

    /// SI value of one display unit.
    pub fn display_scale(self) -> f64 {
        match self {
            Dimension::Dimensionless => 1.0,
            Dimension::Length => UM,
            Dimension::Area => UM * UM,
            Dimension::Time => MIN,
            Dimension::Pressure => MPA,
            Dimension::Velocity => UM / MIN,
        }
    }
}

fn simple_unit(s: &str) -> Option<(Dimension, f64)> {
    let u = match s {
        "m" => (Dimension::Length, 1.0),
        "mm" => (Dimension::Length, MM),
        "um" | "µm" => (Dimension::Length, UM),
        "nm" => (Dimension::Length, NM),
        "um2" | "um^2" | "µm2" | "µm²" => (Dimension::Area, UM * UM),
        "s" => (Dimension::Time, 1.0),
        "min" => (Dimension::Time, MIN),
        "Pa" => (Dimension::Pressure, 1.0),
        "MPa" => (Dimension::Pressure, MPA),
        "GPa" => (Dimension::Pressure, GPA),
        "bar" => (Dimension::Pressure, BAR),
        "mbar" => (Dimension::Pressure, MBAR),
        _ => return None,
    };
    Some(u)
}

/// Resolve a unit suffix (`um`, `GPa`, `nm/min`, ...) to its dimension and
/// SI scale. The empty suffix is dimensionless.
pub fn parse_unit(suffix: &str) -> Option<(Dimension, f64)> {
    let suffix = suffix.trim();
    if suffix.is_empty() {
        return Some((Dimension::Dimensionless, 1.0));
    }
    if let Some((num, den)) = suffix.split_once('/') {
        let (dn, sn) = simple_unit(num.trim())?;
        let (dd, sd) = simple_unit(den.trim())?;
        return match (dn, dd) {
            (Dimension::Length, Dimension::Time) => Some((Dimension::Velocity, sn / sd)),
            _ => None,
        };
    }
    simple_unit(suffix)
}

/// Split `"5e-7mbar"` into `(5e-7, "mbar")`.
pub fn split_quantity(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let bytes = text.as_bytes();
    let mut end = 0;
    if end < bytes.len() && (bytes[end] == b'+' || bytes[end] == b'-') {
        end += 1;
    }
    let digits_start = end;
    while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
        end += 1;
    }
    if end == digits_start {
        return None;
    }
    // exponent, only if followed by digits
    if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
        let mut k = end + 1;
        if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
            k += 1;
        }
        if k < bytes.len() && bytes[k].is_ascii_digit() {
            while k < bytes.len() && bytes[k].is_ascii_digit() {
                k += 1;
            }
            end = k;
        }
    }
    let value: f64 = text[..end].parse().ok()?;
    Some((value, text[end..].trim()))
}

/// Format with six significant digits, `%g` style.
pub fn fmt_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.5e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, v);
        trim_zeros(&s)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
