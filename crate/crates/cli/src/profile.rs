//! Pointwise error-bound profiles of uniform recovery, for plotting.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;

use lrecover_core::recovery::{ProfileRow, RecoveryReport};

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFormat {
    Json,
    Csv,
}

impl ProfileFormat {
    pub fn parse(name: &str) -> Result<Self, Failure> {
        match name.to_ascii_lowercase().as_str() {
            "json" => Ok(ProfileFormat::Json),
            "csv" => Ok(ProfileFormat::Csv),
            other => Err(Failure::validation(format!("profile: unsupported format {other:?}"))),
        }
    }

    /// Format named by the file extension.
    pub fn from_path(path: &Path) -> Result<Self, Failure> {
        Self::parse(path.extension().and_then(|e| e.to_str()).unwrap_or(""))
    }
}

fn rows(report: &RecoveryReport) -> Result<&[ProfileRow], Failure> {
    report.profile.as_deref().ok_or_else(|| Failure::precondition("profile: report has no per-point data"))
}

/// Columns `x1..xd,bound,label` with a header line, LF line endings.
pub fn profile_csv(report: &RecoveryReport) -> Result<String, Failure> {
    let rows = rows(report)?;
    let dim = rows.first().map_or(0, |r| r.coords.len());
    let mut out = String::new();
    for k in 1..=dim {
        write!(out, "x{k},").expect("string");
    }
    out.push_str("bound,label\n");
    for r in rows {
        for c in &r.coords {
            write!(out, "{c},").expect("string");
        }
        writeln!(out, "{},{}", r.bound, r.label).expect("string");
    }
    Ok(out)
}

pub fn profile_json(report: &RecoveryReport) -> Result<String, Failure> {
    let rows = rows(report)?;
    let mut text = serde_json::to_string_pretty(&json!({ "rows": rows })).expect("serializable");
    text.push('\n');
    Ok(text)
}

pub fn emit_profile(report: &RecoveryReport, format: ProfileFormat, path: &Path) -> Result<(), Failure> {
    let text = match format {
        ProfileFormat::Json => profile_json(report)?,
        ProfileFormat::Csv => profile_csv(report)?,
    };
    std::fs::write(path, text).map_err(|e| Failure::precondition(format!("{}: {e}", path.display())))
}
