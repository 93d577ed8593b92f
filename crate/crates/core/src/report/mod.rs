//! Deterministic CSV emission and the sweep drivers behind it.
//!
//! Every file starts with `#` lines carrying the config digest, the
//! canonical config and the seed, followed by a header row. Reals are
//! printed in scientific notation with 17 significant digits, so two runs
//! agree byte for byte exactly when their numbers agree bit for bit.

mod runs;

use std::fmt;
use std::io::Write;

use crate::config::{RunConfig, CONFIG_PREFIX, HASH_PREFIX, SEED_PREFIX};
use crate::error::{Error, Result};

pub use runs::{
    codes_report, fidelity_rows, lattice_rows, repeater_rows, wigner_rows, FIDELITY_COLUMNS, LATTICE_COLUMNS,
    REPEATER_COLUMNS, WIGNER_COLUMNS,
};

/// First cell of the row written in place of a failed computation.
pub const FAILURE_SENTINEL: &str = "FAILED";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Real(f64),
}

/// `x` with 17 significant digits, e.g. `6.0000000000000000e0`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Text(s) => f.write_str(s),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Real(x) => f.write_str(&format_real(*x)),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<u32> for Cell {
    fn from(i: u32) -> Self {
        Cell::Int(i as i64)
    }
}

/// Writes header lines, the column row and `rows` in order.
///
/// Rows are written up to the first failure, which is replaced by a
/// sentinel row (`FAILED`, message, blanks) and returned as the error.
pub fn write_csv<W: Write>(
    out: W,
    config: &RunConfig,
    seed: u64,
    columns: &[&str],
    rows: impl IntoIterator<Item = Result<Vec<Cell>>>,
) -> Result<()> {
    let mut out = out;
    writeln!(out, "{HASH_PREFIX}{}", config.sha256())?;
    writeln!(out, "{CONFIG_PREFIX}{}", config.canonical_json())?;
    writeln!(out, "{SEED_PREFIX}{seed}")?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(columns).map_err(csv_err)?;
    for row in rows {
        match row {
            Ok(cells) => {
                debug_assert_eq!(cells.len(), columns.len());
                w.write_record(cells.iter().map(|c| c.to_string())).map_err(csv_err)?;
            }
            Err(e) => {
                let mut sentinel = vec![FAILURE_SENTINEL.to_string(), e.to_string()];
                sentinel.resize(columns.len().max(2), String::new());
                w.write_record(&sentinel).map_err(csv_err)?;
                w.flush()?;
                return Err(e);
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// [`write_csv`] into a string.
pub fn csv_string(
    config: &RunConfig,
    seed: u64,
    columns: &[&str],
    rows: impl IntoIterator<Item = Result<Vec<Cell>>>,
) -> (String, Result<()>) {
    let mut buf = Vec::new();
    let res = write_csv(&mut buf, config, seed, columns, rows);
    (String::from_utf8(buf).expect("CSV output is UTF-8"), res)
}
