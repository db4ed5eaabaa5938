//! Text and tabular rendering of process reports and sweeps.
//!
//! The tabular form is CSV with header `field,units,value`, one quantity
//! per row, values printed with six significant digits. Booleans are
//! written as `1`/`0` with unit `bool`.

use std::fmt::Write as _;

use crate::calibrate::Calibration;
use crate::error::{Error, Result};
use crate::pipeline::{MoldingReport, ProcessReport, Sweep};
use crate::units::{fmt_sig6, MBAR, MIN, MPA, NM, UM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Tabular,
}

/// One `field,units,value` row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub field: String,
    pub units: &'static str,
    pub value: f64,
}

fn row(field: impl Into<String>, units: &'static str, value: f64) -> Row {
    Row { field: field.into(), units, value }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn molding_rows(m: &MoldingReport) -> Vec<Row> {
    vec![
        row("cap_thickness", "um", m.cap_thickness / UM),
        row("molding_pressure", "MPa", m.pressure / MPA),
        row("w_max", "nm", m.w_max / NM),
        row("sigma_max", "MPa", m.sigma_max / MPA),
        row("safety_factor", "1", m.safety_factor),
        row("deflection_ok", "bool", flag(m.deflection_ok)),
        row("stress_ok", "bool", flag(m.stress_ok)),
    ]
}

/// Rows of a process report, in display units.
pub fn report_rows(r: &ProcessReport) -> Vec<Row> {
    let mut rows = vec![
        row("t_release", "min", r.t_release / MIN),
        row("structural_loss", "nm", r.structural_loss / NM),
        row("report_time", "min", r.report_time / MIN),
    ];
    for h in &r.holes {
        let f = |k: &str| format!("hole.{}.{k}", h.name);
        rows.push(row(f("count"), "1", h.count as f64));
        rows.push(row(f("underetch"), "um", h.underetch / UM));
        rows.push(row(f("clog_thickness"), "um", h.clog_thickness / UM));
        rows.push(row(f("remaining_aperture"), "nm", h.remaining_aperture / NM));
        rows.push(row(f("residue"), "nm", h.residue_thickness / NM));
        rows.push(row(f("residue_footprint"), "um", h.residue_footprint / UM));
    }
    rows.push(row("governing_clog_thickness", "um", r.governing_clog_thickness / UM));
    rows.push(row("clog_deposition", "um", r.clog_deposition / UM));
    rows.push(row("sealed", "bool", flag(r.sealed)));
    rows.push(row("cavity_pressure", "mbar", r.cavity_pressure / MBAR));
    rows.extend(molding_rows(&r.molding));
    rows.push(row("pass", "bool", flag(r.pass())));
    rows
}

pub fn calibration_rows(c: &Calibration) -> Vec<Row> {
    vec![
        row("intrinsic_rate", "um/min", c.params.intrinsic_rate / (UM / MIN)),
        row("aperture_constant", "um2", c.params.aperture_constant / (UM * UM)),
        row("path_constant", "1", c.params.path_constant),
        row("reference_thickness", "um", c.params.reference_thickness / UM),
        row("residual_norm", "um", c.residual_norm / UM),
    ]
}

pub fn tabular(rows: &[Row]) -> String {
    let mut s = String::from("field,units,value\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.field, r.units, fmt_sig6(r.value));
    }
    s
}

fn text_table(title: &str, rows: &[Row]) -> String {
    let width = rows.iter().map(|r| r.field.len()).max().unwrap_or(0);
    let mut s = format!("{title}\n");
    for r in rows {
        let value = match r.units {
            "bool" => (if r.value != 0.0 { "yes" } else { "no" }).to_string(),
            "1" => fmt_sig6(r.value),
            u => format!("{} {u}", fmt_sig6(r.value)),
        };
        let _ = writeln!(s, "  {:<width$}  {value}", r.field);
    }
    s
}

pub fn emit_report(r: &ProcessReport, format: Format) -> String {
    let rows = report_rows(r);
    match format {
        Format::Tabular => tabular(&rows),
        Format::Text => {
            let verdict = if r.pass() { "PASS" } else { "FAIL" };
            format!("{}result: {verdict}\n", text_table("process report", &rows))
        }
    }
}

pub fn emit_molding(m: &MoldingReport, format: Format) -> String {
    let mut rows = molding_rows(m);
    rows.push(row("pass", "bool", flag(m.pass())));
    match format {
        Format::Tabular => tabular(&rows),
        Format::Text => text_table("molding check", &rows),
    }
}

pub fn emit_calibration(c: &Calibration, format: Format) -> String {
    let rows = calibration_rows(c);
    match format {
        Format::Tabular => tabular(&rows),
        Format::Text => text_table("etch calibration", &rows),
    }
}

/// Columns written after the swept value, one row per hole group.
pub const SWEEP_COLUMNS: [&str; 11] = [
    "hole",
    "t_release_min",
    "underetch_um",
    "clog_thickness_um",
    "remaining_aperture_nm",
    "residue_nm",
    "residue_footprint_um",
    "governing_clog_um",
    "w_max_nm",
    "sigma_max_mpa",
    "pass",
];

/// Sweep table; the first column is `value_<unit>` in display units.
pub fn emit_sweep(s: &Sweep, format: Format) -> String {
    let unit = s.dimension.display_unit();
    let scale = s.dimension.display_scale();
    let mut out = String::new();
    if format == Format::Text {
        let _ = writeln!(out, "sweep of {} ({unit})", s.param);
    }
    let _ = writeln!(out, "value_{unit},{}", SWEEP_COLUMNS.join(","));
    for r in &s.rows {
        let p = &r.report;
        for h in &p.holes {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt_sig6(r.value / scale),
                h.name,
                fmt_sig6(p.t_release / MIN),
                fmt_sig6(h.underetch / UM),
                fmt_sig6(h.clog_thickness / UM),
                fmt_sig6(h.remaining_aperture / NM),
                fmt_sig6(h.residue_thickness / NM),
                fmt_sig6(h.residue_footprint / UM),
                fmt_sig6(p.governing_clog_thickness / UM),
                fmt_sig6(p.molding.w_max / NM),
                fmt_sig6(p.molding.sigma_max / MPA),
                u8::from(p.pass()),
            );
        }
    }
    out
}

/// Read back rows written by [`tabular`].
pub fn parse_tabular(text: &str) -> Result<Vec<(String, String, f64)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, "field,units,value")) => {}
        Some((i, _)) => return Err(Error::parse(i + 1, "expected header 'field,units,value'")),
        None => return Err(Error::parse(0, "empty table")),
    }
    lines
        .map(|(i, l)| {
            let mut it = l.splitn(3, ',');
            match (it.next(), it.next(), it.next()) {
                (Some(f), Some(u), Some(v)) => {
                    let v: f64 = v.trim().parse().map_err(|_| Error::parse(i + 1, format!("bad value '{v}'")))?;
                    Ok((f.to_string(), u.to_string(), v))
                }
                _ => Err(Error::parse(i + 1, "expected three columns")),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabular_round_trips() {
        let rows = vec![row("w_max", "nm", 18.7312345), row("pass", "bool", 1.0), row("p", "mbar", 5e-7)];
        let text = tabular(&rows);
        assert!(text.starts_with("field,units,value\n"));
        let back = parse_tabular(&text).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[0].0, "w_max");
        assert!((back[0].2 - 18.7312).abs() < 1e-9);
        assert_eq!(back[2].2, 5e-7);
    }

    #[test]
    fn parse_rejects_missing_header() {
        assert!(parse_tabular("a,b,1\n").is_err());
    }
}
