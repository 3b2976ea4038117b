//! Trial records as json-lines or csv, plus a flat `key=value` summary file.
//!
//! Column order: trial_index, seed_master, seed_stream, n_a, n_b, claim_id,
//! lhs, rhs, margin, violated, wall_time_ms, diagnostic. Reals are written
//! with 17 significant digits so that they parse back bit-exactly.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::Value;

use super::{TrialRecord, VerificationReport};
use crate::error::{Error, Result};

const COLUMNS: [&str; 12] = [
    "trial_index",
    "seed_master",
    "seed_stream",
    "n_a",
    "n_b",
    "claim_id",
    "lhs",
    "rhs",
    "margin",
    "violated",
    "wall_time_ms",
    "diagnostic",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    JsonLines,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" | "jsonl" | "json-lines" => Ok(ReportFormat::JsonLines),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Parse(format!("unknown report format {other:?}"))),
        }
    }
}

fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn json_real(x: f64) -> String {
    if x.is_finite() {
        real(x)
    } else {
        "null".to_string()
    }
}

fn json_line(r: &TrialRecord) -> String {
    let diagnostic = match &r.diagnostic {
        Some(d) => Value::String(d.clone()).to_string(),
        None => "null".to_string(),
    };
    format!(
        "{{\"trial_index\":{},\"seed_master\":{},\"seed_stream\":{},\"n_a\":{},\"n_b\":{},\"claim_id\":\"{}\",\"lhs\":{},\"rhs\":{},\"margin\":{},\"violated\":{},\"wall_time_ms\":{},\"diagnostic\":{}}}",
        r.trial_index,
        r.seed.0,
        r.seed.1,
        r.dims.0,
        r.dims.1,
        r.claim,
        json_real(r.lhs),
        json_real(r.rhs),
        json_real(r.margin),
        r.violated,
        json_real(r.wall_time_ms),
        diagnostic
    )
}

fn csv_row(r: &TrialRecord) -> [String; 12] {
    [
        r.trial_index.to_string(),
        r.seed.0.to_string(),
        r.seed.1.to_string(),
        r.dims.0.to_string(),
        r.dims.1.to_string(),
        r.claim.to_string(),
        real(r.lhs),
        real(r.rhs),
        real(r.margin),
        r.violated.to_string(),
        real(r.wall_time_ms),
        r.diagnostic.clone().unwrap_or_default(),
    ]
}

/// `<path>.summary`.
pub fn summary_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".summary");
    PathBuf::from(name)
}

/// Writes the records to `path` and the reports to `<path>.summary`.
pub fn write_report(reports: &[VerificationReport], records: &[TrialRecord], path: &Path, format: ReportFormat) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::JsonLines => {
            for r in records {
                writeln!(out, "{}", json_line(r))?;
            }
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(COLUMNS).map_err(|e| Error::Io(e.to_string()))?;
            for r in records {
                w.write_record(csv_row(r)).map_err(|e| Error::Io(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    write_summary(reports, &summary_path(path))
}

/// Renders reports as blank-line separated `key=value` blocks.
pub fn summary_text(reports: &[VerificationReport]) -> String {
    let mut s = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let c = &r.config;
        let _ = writeln!(s, "claim_id={}", r.claim);
        if let Some(mode) = r.mode {
            let _ = writeln!(s, "mode={}", mode.as_str());
        }
        let _ = writeln!(s, "trials={}", r.trials);
        let _ = writeln!(s, "violations={}", r.violations);
        let _ = writeln!(s, "failures={}", r.failures);
        let _ = writeln!(s, "min_margin={}", real(r.min_margin));
        let _ = writeln!(s, "n_a={}", c.n_a);
        let _ = writeln!(s, "n_b={}", c.n_b);
        let _ = writeln!(s, "tol={}", real(c.tol));
        let _ = writeln!(s, "master_seed={}", c.master_seed);
        let _ = writeln!(s, "restarts={}", c.search.restarts);
        let _ = writeln!(s, "optimizer_tol={}", real(c.search.tol));
        let _ = writeln!(s, "max_iters={}", c.search.max_iters);
        let _ = writeln!(s, "kraus_count={}", c.kraus_count);
        let _ = writeln!(s, "bases_per_trial={}", c.bases_per_trial);
    }
    s
}

pub fn write_summary(reports: &[VerificationReport], path: &Path) -> Result<()> {
    std::fs::write(path, summary_text(reports))?;
    Ok(())
}

fn parse_real(s: &str) -> Result<f64> {
    match s {
        "NaN" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| Error::Parse(format!("bad real {s:?}"))),
    }
}

fn parse_int<T: FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

fn record_from_fields(f: &[&str], diagnostic: Option<String>) -> Result<TrialRecord> {
    Ok(TrialRecord {
        trial_index: parse_int(f[0])?,
        seed: (parse_int(f[1])?, parse_int(f[2])?),
        dims: (parse_int(f[3])?, parse_int(f[4])?),
        claim: f[5].parse()?,
        lhs: parse_real(f[6])?,
        rhs: parse_real(f[7])?,
        margin: parse_real(f[8])?,
        violated: parse_int(f[9])?,
        wall_time_ms: parse_real(f[10])?,
        diagnostic,
    })
}

fn json_field(v: &Value, key: &str) -> Result<String> {
    match v.get(key) {
        Some(Value::Null) => Ok("NaN".into()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        Some(Value::Bool(b)) => Ok(b.to_string()),
        _ => Err(Error::Parse(format!("missing field {key:?}"))),
    }
}

/// Parses a record file written by [`write_report`].
pub fn read_records(path: &Path, format: ReportFormat) -> Result<Vec<TrialRecord>> {
    match format {
        ReportFormat::JsonLines => {
            let reader = BufReader::new(File::open(path)?);
            let mut records = Vec::new();
            for line in reader.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let v: Value = serde_json::from_str(&line).map_err(|e| Error::Parse(e.to_string()))?;
                let fields: Vec<String> = COLUMNS[..11].iter().map(|k| json_field(&v, k)).collect::<Result<_>>()?;
                let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
                let diagnostic = v.get("diagnostic").and_then(Value::as_str).map(str::to_owned);
                records.push(record_from_fields(&refs, diagnostic)?);
            }
            Ok(records)
        }
        ReportFormat::Csv => {
            let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
            let mut records = Vec::new();
            for row in reader.records() {
                let row = row.map_err(|e| Error::Parse(e.to_string()))?;
                let fields: Vec<&str> = row.iter().collect();
                if fields.len() != COLUMNS.len() {
                    return Err(Error::Parse(format!("expected {} columns, got {}", COLUMNS.len(), fields.len())));
                }
                let diagnostic = Some(fields[11]).filter(|d| !d.is_empty()).map(str::to_owned);
                records.push(record_from_fields(&fields, diagnostic)?);
            }
            Ok(records)
        }
    }
}
