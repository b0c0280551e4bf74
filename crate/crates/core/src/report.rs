//! CSV and JSON emission with the shared number formatting rules: six
//! significant digits in general, three decimals for threshold columns,
//! shortest round-trip representation under [`Precision::Full`].

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Rounded,
    Full,
}

pub const SIGNIFICANT_DIGITS: i32 = 6;
pub const THRESHOLD_DECIMALS: usize = 3;

fn non_finite(x: f64) -> Option<String> {
    if x.is_nan() {
        Some("nan".into())
    } else if x.is_infinite() {
        Some(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        None
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` with six significant digits, trailing zeros removed.
pub fn fmt_num(x: f64, precision: Precision) -> String {
    if let Some(s) = non_finite(x) {
        return s;
    }
    if precision == Precision::Full {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&mag) {
        return format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x);
    }
    let decimals = SIGNIFICANT_DIGITS - 1 - mag;
    if decimals >= 0 {
        let s = format!("{:.*}", decimals as usize, x);
        // rounding may carry into a new leading digit; one decimal too many then
        let s = if s.trim_start_matches('-').trim_start_matches('0').trim_start_matches('.').len()
            > SIGNIFICANT_DIGITS as usize + 1
        {
            format!("{:.*}", (decimals - 1).max(0) as usize, x)
        } else {
            s
        };
        trim_zeros(s)
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{}", (x / scale).round() * scale)
    }
}

/// Threshold columns: three decimals.
pub fn fmt_threshold(x: f64, precision: Precision) -> String {
    if let Some(s) = non_finite(x) {
        return s;
    }
    match precision {
        Precision::Full => format!("{x}"),
        Precision::Rounded => format!("{:.*}", THRESHOLD_DECIMALS, x),
    }
}

/// The value [`fmt_num`] prints, as a number (for JSON output).
pub fn round_num(x: f64, precision: Precision) -> f64 {
    fmt_num(x, precision).parse().unwrap_or(x)
}

pub fn round_threshold(x: f64, precision: Precision) -> f64 {
    fmt_threshold(x, precision).parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Threshold(f64),
    Text(String),
    /// Printed as `NA`.
    Missing,
}

impl Cell {
    pub fn render(&self, precision: Precision) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(x) => fmt_num(*x, precision),
            Cell::Threshold(x) => fmt_threshold(*x, precision),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Missing => "NA".into(),
        }
    }
}

/// Header row then one line per row.
pub fn write_csv<W: Write + ?Sized>(header: &[&str], rows: &[Vec<Cell>], precision: Precision, sink: &mut W) -> Result<()> {
    writeln!(sink, "{}", header.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let line: Vec<String> = row.iter().map(|c| c.render(precision)).collect();
        writeln!(sink, "{}", line.join(","))?;
    }
    Ok(())
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<T: Serialize + ?Sized, W: Write + ?Sized>(value: &T, sink: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *sink, value).map_err(std::io::Error::from)?;
    writeln!(sink)?;
    Ok(())
}
