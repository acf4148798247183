//! CSV emission and parsing. Every file starts with a schema comment line so
//! downstream plotting tools can sanity-check what they were handed.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const SCHEMA_LINE: &str = "# schema=lfi-kit/v1";

/// Write a CSV file: schema comment, header, then rows of f64 cells.
/// Cells use Rust's shortest-roundtrip float formatting, so identical values
/// always serialize to identical bytes.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "{SCHEMA_LINE}")?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::DimensionMismatch {
                context: "csv row width",
                expected: header.len(),
                got: row.len(),
            });
        }
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Parse a file written by [`write_csv`]; checks the schema line.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let raw = std::fs::read_to_string(path)?;
    let mut lines = raw.lines();
    match lines.next() {
        Some(line) if line == SCHEMA_LINE => {}
        other => {
            return Err(Error::InvalidConfig(format!(
                "{}: missing schema line (got {:?})",
                path.display(),
                other
            )))
        }
    }
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig(format!("{}: missing header", path.display())))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(str::parse::<f64>).collect();
        let row = row.map_err(|e| {
            Error::InvalidConfig(format!("{}: bad cell: {e}", path.display()))
        })?;
        if row.len() != header.len() {
            return Err(Error::DimensionMismatch {
                context: "csv row width",
                expected: header.len(),
                got: row.len(),
            });
        }
        rows.push(row);
    }
    Ok((header, rows))
}
