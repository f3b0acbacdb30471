//! JSON reports and CSV tables.

use super::config::SuiteConfig;
use crate::error::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha), one stream per check";

/// Outcome of one registered check. `passed` is `residual <= tolerance`
/// with a finite residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub tag: String,
    pub inputs_digest: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(name: &str, tag: &str, inputs_digest: String, residual: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            tag: tag.to_string(),
            inputs_digest,
            residual,
            tolerance,
            passed: residual.is_finite() && residual <= tolerance,
            detail,
        }
    }

    /// A check whose computation failed outright.
    pub fn errored(name: &str, tag: &str, tolerance: f64, err: &Error) -> Self {
        Self {
            name: name.to_string(),
            tag: tag.to_string(),
            inputs_digest: digest(&"error"),
            residual: f64::NAN,
            tolerance,
            passed: false,
            detail: format!("error: {err}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub generator: String,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    /// Command-specific payload.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
}

impl Report {
    pub fn new(command: &str, config: &SuiteConfig, checks: Vec<CheckRecord>, data: Option<serde_json::Value>) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: config.seed,
            generator: GENERATOR.to_string(),
            config: config.clone(),
            summary: Summary {
                total: checks.len(),
                passed,
                failed: checks.len() - passed,
            },
            checks,
            data,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
    }
}

/// SHA-256 of the compact JSON serialization, hex encoded.
pub fn digest<T: Serialize + ?Sized>(inputs: &T) -> String {
    let bytes = serde_json::to_vec(inputs).expect("inputs serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// CSV with a mandatory header; floats written with 17 significant digits.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|x| format_float(*x)))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
    }

    pub fn to_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii output")
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Parses a CSV written by [`CsvTable`].
pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let bad = |e: csv::Error| Error::InvalidArgument(format!("CSV: {e}"));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(bad)?.iter().map(str::to_string).collect::<Vec<_>>();
    if header.is_empty() {
        return Err(Error::InvalidArgument("empty CSV".into()));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = record
            .map_err(bad)?
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidArgument(format!("row {i}: {e}")))?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1f64 + 0.2;
        let s = format_float(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(s, "3.0000000000000004e-1");
    }

    #[test]
    fn csv_round_trip() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec![1.0, -2.5e-300]);
        t.push(vec![f64::INFINITY, 0.0]);
        let back = parse_csv(&t.to_string()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn header_only_table() {
        let t = CsvTable::new(&["x", "y"]);
        assert_eq!(t.to_string(), "x,y\n");
        assert!(parse_csv(&t.to_string()).unwrap().rows.is_empty());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(parse_csv("a,b\n1,2,3\n").is_err());
    }
}
