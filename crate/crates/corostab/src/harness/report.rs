//! The stability report file: schema-versioned JSON (or CSV) with every
//! number carrying 17 significant digits so values round-trip exactly and
//! identical runs serialize byte-identically.

use super::config::{ReportFormat, ScanConfig};
use crate::stability::{AuditViolation, BeVerdict, StabilityVerdict, Verdict};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Current report schema version.
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("report serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

/// One audited state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateRecord {
    pub key: String,
    #[serde(flatten)]
    pub verdict: StabilityVerdict,
}

/// Two-route oracle residuals aggregated over the scan: the eigenbasis
/// block assembly against the weighted stiffness identity (q1) and the
/// divided-difference shear coefficients against the principal-stress form
/// (q2).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OracleResiduals {
    pub q1_max: f64,
    pub q1_mean: f64,
    pub q2_max: f64,
    pub q2_mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlavorSummary {
    pub pass: usize,
    pub fail: usize,
    pub marginal: usize,
    pub inconsistent: usize,
    /// Key of the state with the smallest stiffness eigenvalue.
    pub worst_state: String,
    pub worst_min_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSummary {
    pub states: usize,
    pub cauchy: FlavorSummary,
    pub kirchhoff: FlavorSummary,
    pub equivalence_violations: Vec<AuditViolation>,
    pub be_violations: Vec<AuditViolation>,
    pub consistent: bool,
    pub warnings: Vec<String>,
}

/// The persisted report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReportFile {
    pub schema: u32,
    pub config: ScanConfig,
    pub states: Vec<StateRecord>,
    pub summary: ReportSummary,
    pub oracle_residuals: OracleResiduals,
}

pub fn flavor_summary<'a>(
    records: impl Iterator<Item = (&'a String, Verdict, f64)>,
) -> FlavorSummary {
    let mut summary = FlavorSummary {
        pass: 0,
        fail: 0,
        marginal: 0,
        inconsistent: 0,
        worst_state: String::new(),
        worst_min_eigenvalue: f64::INFINITY,
    };
    for (key, verdict, min_eig) in records {
        match verdict {
            Verdict::Pass => summary.pass += 1,
            Verdict::Fail => summary.fail += 1,
            Verdict::Marginal => summary.marginal += 1,
            Verdict::Inconsistent => summary.inconsistent += 1,
        }
        if min_eig < summary.worst_min_eigenvalue {
            summary.worst_min_eigenvalue = min_eig;
            summary.worst_state = key.clone();
        }
    }
    summary
}

// serde_json formatter printing every float with 17 significant digits
// ({:.16e}), which round-trips f64 exactly and keeps bodies byte-stable.
struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Serializes the report as JSON with fixed-width floats.
pub fn to_json_bytes(report: &StabilityReportFile) -> Result<Vec<u8>, ReportError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    report.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// Parses a JSON report (accepts any valid JSON number formatting).
pub fn from_json_bytes(bytes: &[u8]) -> Result<StabilityReportFile, ReportError> {
    Ok(serde_json::from_slice(bytes)?)
}

fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Marginal => "marginal",
        Verdict::Inconsistent => "inconsistent",
    }
}

fn be_fields(be: &BeVerdict) -> (String, String) {
    (
        if be.pass { "pass" } else { "fail" }.to_string(),
        fmt_opt(be.margin),
    )
}

/// Serializes the per-state table as CSV (the summary is JSON-only).
pub fn to_csv_bytes(report: &StabilityReportFile) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(
        "key,x1,x2,x3,lambda1,lambda2,lambda3,volume_ratio,\
         sigma1,sigma2,sigma3,tau1,tau2,tau3,\
         lambda_min_cauchy,lambda_min_kirchhoff,\
         csp_exact_min_cauchy,csp_exact_min_kirchhoff,\
         csp_sampled_min_cauchy,csp_sampled_min_kirchhoff,\
         be_cauchy,be_margin_cauchy,be_kirchhoff,be_margin_kirchhoff,\
         verdict_cauchy,verdict_kirchhoff\n",
    );
    for record in &report.states {
        let v = &record.verdict;
        let (be_c, be_c_margin) = be_fields(&v.be_cauchy);
        let (be_k, be_k_margin) = be_fields(&v.be_kirchhoff);
        let fields: Vec<String> = vec![
            record.key.clone(),
            fmt_f64(v.x[0]),
            fmt_f64(v.x[1]),
            fmt_f64(v.x[2]),
            fmt_f64(v.stretches[0]),
            fmt_f64(v.stretches[1]),
            fmt_f64(v.stretches[2]),
            fmt_f64(v.volume_ratio),
            fmt_f64(v.principal_cauchy[0]),
            fmt_f64(v.principal_cauchy[1]),
            fmt_f64(v.principal_cauchy[2]),
            fmt_f64(v.principal_kirchhoff[0]),
            fmt_f64(v.principal_kirchhoff[1]),
            fmt_f64(v.principal_kirchhoff[2]),
            fmt_f64(v.lambda_min_cauchy),
            fmt_f64(v.lambda_min_kirchhoff),
            fmt_f64(v.csp_exact_min_cauchy),
            fmt_f64(v.csp_exact_min_kirchhoff),
            fmt_opt(v.csp_sampled_min_cauchy),
            fmt_opt(v.csp_sampled_min_kirchhoff),
            be_c,
            be_c_margin,
            be_k,
            be_k_margin,
            verdict_label(v.verdict_cauchy).to_string(),
            verdict_label(v.verdict_kirchhoff).to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// Renders the report in the requested format.
pub fn render(report: &StabilityReportFile, format: ReportFormat) -> Result<Vec<u8>, ReportError> {
    match format {
        ReportFormat::Json => to_json_bytes(report),
        ReportFormat::Csv => Ok(to_csv_bytes(report)),
    }
}

/// Writes atomically: the bytes land in a sibling temp file first and are
/// renamed into place, so failures leave no partial report behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ReportError> {
    let io_err = |source: std::io::Error| ReportError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    {
        let mut file = std::fs::File::create(&tmp_path).map_err(io_err)?;
        file.write_all(bytes).map_err(io_err)?;
        file.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp_path, path).map_err(io_err)
}
