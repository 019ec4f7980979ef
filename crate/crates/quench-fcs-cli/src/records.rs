//! Sweep records and the CSV/JSON emitters.
//!
//! CSV is the canonical output. Columns, in order:
//! `A,method,kappa1,kappa2,kappa3,kappa1_T,kappa2_T,kappa3_T,gamma,config_hash`.
//! Floats are written in Rust's shortest round-trip form, so re-parsing an
//! emitted file reproduces the records bit for bit, and files from identical
//! configs are byte-identical. Timestamps appear only in the JSON envelope.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{MethodName, SweepConfig};
use crate::fit::PowerLawFit;
use quench_fcs::counting::KinkDistribution;
use quench_fcs::{Error, Result};

pub const CSV_HEADER: &str =
    "A,method,kappa1,kappa2,kappa3,kappa1_T,kappa2_T,kappa3_T,gamma,config_hash";

/// One sweep point: a quench time, a method, the kink-pair cumulants, and
/// their total-kink counterparts `kappa_q^T = 2^q kappa_q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub a: f64,
    pub method: MethodName,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa1_total: f64,
    pub kappa2_total: f64,
    pub kappa3_total: f64,
    /// Dephasing rate used for this record (zero for coherent methods).
    pub gamma: f64,
    pub config_hash: String,
    /// Relative path of the PMF dump, when one was emitted.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pmf_file: Option<String>,
    #[serde(skip)]
    pub pmf: Option<KinkDistribution>,
}

impl SweepRecord {
    pub fn kappa(&self, q: u8) -> f64 {
        match q {
            1 => self.kappa1,
            2 => self.kappa2,
            3 => self.kappa3,
            _ => f64::NAN,
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.a,
            self.method,
            self.kappa1,
            self.kappa2,
            self.kappa3,
            self.kappa1_total,
            self.kappa2_total,
            self.kappa3_total,
            self.gamma,
            self.config_hash
        )
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::invalid(format!("I/O failure at {}: {e}", path.display()))
}

/// Marker distinguishing I/O failures (exit code 3) from validation errors.
pub fn is_io_error(e: &Error) -> bool {
    matches!(e, Error::InvalidInput(msg) if msg.starts_with("I/O failure"))
}

/// Write records as canonical CSV.
pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::invalid("refusing to emit an empty record set".to_string()));
    }
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for r in records {
        text.push_str(&r.csv_line());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Parse a CSV file produced by [`write_csv`].
pub fn parse_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::invalid(format!(
                "unexpected CSV header in {}: {other:?}",
                path.display()
            )))
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::invalid(format!(
                "line {} of {}: expected 10 fields, got {}",
                idx + 2,
                path.display(),
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| Error::invalid(format!("bad float {s:?}: {e}")))
        };
        records.push(SweepRecord {
            a: num(fields[0])?,
            method: MethodName::parse(fields[1])?,
            kappa1: num(fields[2])?,
            kappa2: num(fields[3])?,
            kappa3: num(fields[4])?,
            kappa1_total: num(fields[5])?,
            kappa2_total: num(fields[6])?,
            kappa3_total: num(fields[7])?,
            gamma: num(fields[8])?,
            config_hash: fields[9].to_string(),
            pmf_file: None,
            pmf: None,
        });
    }
    Ok(records)
}

/// A fit tagged with the method whose records produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodFit {
    pub method: MethodName,
    #[serde(flatten)]
    pub fit: PowerLawFit,
}

/// JSON envelope mirroring the CSV records plus fits and the effective
/// config.
#[derive(Debug, Serialize, Deserialize)]
pub struct JsonDocument {
    pub config: SweepConfig,
    pub config_hash: String,
    /// Unix seconds at emission; the only non-deterministic field.
    pub generated_unix: u64,
    pub records: Vec<SweepRecord>,
    pub fits: Vec<MethodFit>,
}

pub fn write_json(
    config: &SweepConfig,
    records: &[SweepRecord],
    fits: &[MethodFit],
    path: &Path,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::invalid("refusing to emit an empty record set".to_string()));
    }
    let doc = JsonDocument {
        config: config.clone(),
        config_hash: config.physics_hash(),
        generated_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        records: records.to_vec(),
        fits: fits.to_vec(),
    };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::invalid(format!("JSON encoding failure: {e}")))?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// PMF dump path `pmf_A<value>_<method>.csv` next to the record outputs.
pub fn pmf_file_name(a: f64, method: MethodName) -> String {
    format!("pmf_A{a}_{method}.csv")
}

/// Write one PMF as `n,P` rows.
pub fn write_pmf(dist: &KinkDistribution, dir: &Path, a: f64, method: MethodName) -> Result<PathBuf> {
    let path = dir.join(pmf_file_name(a, method));
    let mut text = String::from("n,P\n");
    for (n, p) in dist.pmf.iter().enumerate() {
        text.push_str(&format!("{n},{p}\n"));
    }
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Stream a small human-readable table of records.
pub fn print_records(records: &[SweepRecord], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{:>12} {:>12} {:>14} {:>14} {:>14}", "A", "method", "kappa1", "kappa2", "kappa3")?;
    for r in records {
        writeln!(
            out,
            "{:>12.6} {:>12} {:>14.8} {:>14.8} {:>14.8}",
            r.a,
            r.method.to_string(),
            r.kappa1,
            r.kappa2,
            r.kappa3
        )?;
    }
    Ok(())
}
