//! CSV and SVG emission. Every file is written to a temporary sibling and
//! renamed into place, so an interrupted run never leaves a truncated file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

/// Version tag recorded in every output header.
pub const ARTIFACT_VERSION: &str = concat!("decoherence-cli ", env!("CARGO_PKG_VERSION"));

/// Shortest round-trip scientific notation; stable across runs.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Ten significant digits with trailing zeros dropped, for terminal reports.
pub fn short(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.9e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let mantissa = if mantissa.contains('.') {
        mantissa.trim_end_matches('0').trim_end_matches('.')
    } else {
        mantissa
    };
    format!("{mantissa}e{exp}")
}

/// A CSV table with documented columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem; the table is written to `<name>.csv`.
    pub name: String,
    /// `(column, description)`.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(name: impl Into<String>, columns: impl IntoIterator<Item = (S, S)>) -> Self {
        Self {
            name: name.into(),
            columns: columns.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| num(v)).collect());
    }

    /// CSV text: a `#` comment row with `meta`, the header, then the rows.
    pub fn to_csv(&self, meta: &str) -> String {
        let mut out = format!("# {ARTIFACT_VERSION}; {meta}\n");
        let header: Vec<&str> = self.columns.iter().map(|(c, _)| c.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Sidecar text describing the columns.
    pub fn column_notes(&self) -> String {
        let mut out = format!("{}.csv columns\n", self.name);
        for (c, d) in &self.columns {
            out.push_str(&format!("{c}: {d}\n"));
        }
        out
    }
}

/// Output directory plus the header line recorded in each file.
#[derive(Debug, Clone)]
pub struct Output {
    dir: PathBuf,
    meta: String,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: impl Into<PathBuf>, meta: impl Into<String>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self {
            dir,
            meta: meta.into(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn meta(&self) -> &str {
        &self.meta
    }

    /// Files written so far, in order.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `<name>.csv` and `<name>.columns.txt`.
    pub fn table(&mut self, table: &Table) -> Result<PathBuf> {
        let path = self.dir.join(format!("{}.csv", table.name));
        write_atomic(&path, table.to_csv(&self.meta).as_bytes())?;
        let notes = self.dir.join(format!("{}.columns.txt", table.name));
        write_atomic(&notes, table.column_notes().as_bytes())?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Writes `file_name` verbatim.
    pub fn raw(&mut self, file_name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(file_name);
        write_atomic(&path, contents.as_bytes())?;
        self.written.push(path.clone());
        Ok(path)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", [("t", "time"), ("a", "value")]);
        t.push_numbers(&[0.5, 1e-22]);
        let csv = t.to_csv("k=v");
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# decoherence-cli "));
        assert!(lines[0].ends_with("; k=v"));
        assert_eq!(lines[1], "t,a");
        assert_eq!(lines[2], "5e-1,1e-22");
        assert_eq!(t.column_notes(), "demo.csv columns\nt: time\na: value\n");
    }

    #[test]
    fn short_numbers() {
        assert_eq!(short(0.025000000000000005), "2.5e-2");
        assert_eq!(short(1.0), "1e0");
        assert_eq!(short(166.66666666666663), "1.666666667e2");
        assert_eq!(short(f64::INFINITY), "inf");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Output::new(dir.path().join("nested"), "m").unwrap();
        let t = Table::new("x", [("c", "d")]);
        let p = out.table(&t).unwrap();
        let first = fs::read_to_string(&p).unwrap();
        out.table(&t).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), first);
        assert!(dir.path().join("nested/x.columns.txt").exists());
        let leftovers = fs::read_dir(dir.path().join("nested")).unwrap().count();
        assert_eq!(leftovers, 2);
    }
}
