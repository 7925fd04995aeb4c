//! CSV and JSON rendering of result tables.

use std::fs;
use std::path::{Path, PathBuf};

use su11net_core::Bound;
use thiserror::Error;

use crate::config::Format;
use crate::run::Row;

pub const COLUMNS: [&str; 14] = [
    "scheme",
    "M",
    "r",
    "beta",
    "eval_point",
    "signal",
    "signal_std",
    "slope",
    "delta_measured",
    "qfi_closed",
    "qfi_numeric",
    "qcrb",
    "saturation_ratio",
    "flags",
];

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("refusing to write an empty table")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

/// `%#.9g`: nine significant digits, trailing zeros kept.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-4..9).contains(&exp) {
        format!("{:.*}", (8 - exp) as usize, x)
    } else {
        let (mantissa, _) = sci.split_once('e').expect("scientific notation");
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn csv_record(row: &Row) -> Vec<String> {
    vec![
        row.scheme.id().to_string(),
        row.modes.to_string(),
        format_float(row.r),
        format_float(row.beta),
        format_float(row.eval_point),
        opt(row.signal),
        opt(row.signal_std),
        opt(row.slope),
        opt(row.delta_measured),
        opt(row.qfi_closed),
        opt(row.qfi_numeric),
        match row.qcrb {
            Some(Bound::Finite(b)) => format_float(b),
            Some(Bound::Unbounded) => "unbounded".into(),
            None => String::new(),
        },
        opt(row.saturation_ratio),
        row.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(";"),
    ]
}

pub fn render(rows: &[Row], format: Format) -> Result<String, EmitError> {
    if rows.is_empty() {
        return Err(EmitError::Empty);
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let ser = |e: csv::Error| EmitError::Serialize(e.to_string());
            w.write_record(COLUMNS).map_err(ser)?;
            for row in rows {
                w.write_record(csv_record(row)).map_err(ser)?;
            }
            let bytes = w.into_inner().map_err(|e| EmitError::Serialize(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| EmitError::Serialize(e.to_string()))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| EmitError::Serialize(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn emit(rows: &[Row], format: Format, path: &Path) -> Result<(), EmitError> {
    let text = render(rows, format)?;
    fs::write(path, text).map_err(|source| EmitError::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_float(0.5), "0.500000000");
        assert_eq!(format_float(0.0), "0.00000000");
        assert_eq!(format_float(1.0), "1.00000000");
        assert_eq!(format_float(-0.0919698603), "-0.0919698603");
        assert_eq!(format_float(118.224897569), "118.224898");
        assert_eq!(format_float(9.9999999999), "10.0000000");
        assert_eq!(format_float(1e-4), "0.000100000000");
        assert_eq!(format_float(1.5e-5), "1.50000000e-05");
        assert_eq!(format_float(21865.568), "21865.5680");
        assert_eq!(format_float(1.23456789e12), "1.23456789e+12");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn empty_table_is_rejected() {
        assert!(matches!(render(&[], Format::Csv), Err(EmitError::Empty)));
    }
}
