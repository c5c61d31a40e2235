//! File formats: CSV tables with a `# key=value` metadata header, and JSON.
//!
//! Floats are written with 17 significant digits so that every value reads
//! back bit-for-bit.

use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimation::CoherenceSeries;
use crate::grid::{GridSpec, PhaseGrid};

/// A numeric table with ordered metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        self.meta_value(key).and_then(|v| v.parse().ok())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_table(path: &Path, table: &Table) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
    for (k, v) in &table.meta {
        writeln!(file, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_err(path: &Path, message: String) -> Error {
    Error::Parse {
        source_name: path.display().to_string(),
        message,
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut reader = BufReader::new(fs::File::open(path)?);
    let mut meta = Vec::new();
    let mut header_line = 0usize;
    let mut first = String::new();
    loop {
        first.clear();
        if reader.read_line(&mut first)? == 0 {
            return Err(parse_err(path, "no header row".into()));
        }
        header_line += 1;
        let Some(rest) = first.strip_prefix('#') else { break };
        let rest = rest.trim();
        if rest.is_empty() {
            continue;
        }
        let (k, v) = rest
            .split_once('=')
            .ok_or_else(|| parse_err(path, format!("line {header_line}: metadata must be `# key=value`")))?;
        meta.push((k.trim().to_string(), v.trim().to_string()));
    }
    let body = std::iter::once(Ok(first.clone())).chain(reader.lines());
    let mut text = String::new();
    for line in body {
        text.push_str(&line?);
        text.push('\n');
    }
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let columns: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = header_line + 1 + k;
        if rec.len() != columns.len() {
            return Err(parse_err(path, format!("line {line}: expected {} fields, got {}", columns.len(), rec.len())));
        }
        let row = rec
            .iter()
            .zip(&columns)
            .map(|(field, col)| {
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(path, format!("line {line}, column `{col}`: {e} (`{field}`)")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Table { meta, columns, rows })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))
}

/// Coherence record from a table with columns `t` and `f_gen_obs` (preferred)
/// or `f_gen`; `M` is taken from the metadata when present.
pub fn series_from_table(table: &Table, source: &Path) -> Result<CoherenceSeries> {
    let t = table
        .column("t")
        .ok_or_else(|| parse_err(source, "missing column `t`".into()))?;
    let f = table
        .column("f_gen_obs")
        .or_else(|| table.column("f_gen"))
        .ok_or_else(|| parse_err(source, "missing column `f_gen`".into()))?;
    let noise = table.meta_f64("noise").filter(|v| *v > 0.0);
    CoherenceSeries::new(t, f, table.meta_f64("M"), noise)
}

pub fn read_series(path: &Path) -> Result<CoherenceSeries> {
    series_from_table(&read_table(path)?, path)
}

/// Long-format grid table: columns `q, p, w` with the grid bounds in the metadata.
pub fn grid_to_table(grid: &PhaseGrid) -> Table {
    let s = grid.spec;
    let mut t = Table::new(["q", "p", "w"])
        .with_meta("q_min", fmt_f64(s.q_min))
        .with_meta("q_max", fmt_f64(s.q_max))
        .with_meta("p_min", fmt_f64(s.p_min))
        .with_meta("p_max", fmt_f64(s.p_max))
        .with_meta("step", fmt_f64(s.step));
    for (x, w) in s.points().zip(&grid.values) {
        t.push(vec![x[0], x[1], *w]);
    }
    t
}

pub fn grid_from_table(table: &Table, source: &Path) -> Result<PhaseGrid> {
    let get = |k: &str| table.meta_f64(k).ok_or_else(|| parse_err(source, format!("missing metadata `{k}`")));
    let spec = GridSpec {
        q_min: get("q_min")?,
        q_max: get("q_max")?,
        p_min: get("p_min")?,
        p_max: get("p_max")?,
        step: get("step")?,
    };
    let w = table
        .column("w")
        .ok_or_else(|| parse_err(source, "missing column `w`".into()))?;
    PhaseGrid::from_values(spec, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let mut t = Table::new(["t", "f_gen"]).with_meta("M", 1.5).with_meta("g", "0.1");
        t.push(vec![0.0, 1.0]);
        t.push(vec![0.1, 0.1 + 0.2]);
        t.push(vec![1e-300, std::f64::consts::PI]);
        write_table(&path, &t).unwrap();
        let back = read_table(&path).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.meta_f64("M"), Some(1.5));
    }

    #[test]
    fn parse_error_names_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "# M=1\nt,f_gen\n0,1\n0.1,abc\n").unwrap();
        let err = read_table(&path).unwrap_err().to_string();
        assert!(err.contains("line 4") && err.contains("f_gen"), "{err}");
    }
}
