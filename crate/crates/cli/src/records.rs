//! Output records and deterministic CSV/JSON emission.
//!
//! Floats print with nine significant digits in scientific notation, so
//! records survive a CSV round trip at the printed precision and output
//! bytes depend only on the computed values, never on locale or thread
//! count.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

/// One row of a density/height sweep. Monte Carlo and bound fields are
/// present only when requested; a per-point failure lands in `error`
/// with every affected field left empty.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub lambda_per_km2: f64,
    pub delta_h_m: f64,
    pub model_id: String,
    pub cp_analytic: Option<f64>,
    pub st_analytic: Option<f64>,
    pub cp_mc: Option<f64>,
    pub cp_mc_ci95: Option<f64>,
    pub st_mc: Option<f64>,
    pub cp_lower: Option<f64>,
    pub cp_upper: Option<f64>,
    pub error: Option<String>,
}

/// One critical-density row. Statuses are `ok`, `infeasible` (no density
/// meets the coverage requirement), `unbounded` (zero antenna height
/// difference: throughput keeps growing with density) or `n/a` (no
/// requirement given).
#[derive(Debug, Clone, Serialize)]
pub struct CriticalRecord {
    pub delta_h_m: f64,
    pub model_id: String,
    pub epsilon: Option<f64>,
    pub lambda_star_per_km2: Option<f64>,
    pub lambda_star_status: String,
    pub lambda_dagger_per_km2: Option<f64>,
    pub lambda_dagger_status: String,
    pub method: String,
}

pub trait CsvRow {
    fn header() -> &'static str;
    fn row(&self) -> String;
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.8e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// RFC-4180 quoting; only applied when the field needs it.
fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl CsvRow for SweepRecord {
    fn header() -> &'static str {
        "lambda_per_km2,delta_h_m,model_id,cp_analytic,st_analytic,cp_mc,cp_mc_ci95,st_mc,cp_lower,cp_upper,error"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(self.lambda_per_km2),
            fmt_f64(self.delta_h_m),
            csv_escape(&self.model_id),
            fmt_opt(self.cp_analytic),
            fmt_opt(self.st_analytic),
            fmt_opt(self.cp_mc),
            fmt_opt(self.cp_mc_ci95),
            fmt_opt(self.st_mc),
            fmt_opt(self.cp_lower),
            fmt_opt(self.cp_upper),
            csv_escape(self.error.as_deref().unwrap_or("")),
        )
    }
}

impl CsvRow for CriticalRecord {
    fn header() -> &'static str {
        "delta_h_m,model_id,epsilon,lambda_star_per_km2,lambda_star_status,lambda_dagger_per_km2,lambda_dagger_status,method"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            fmt_f64(self.delta_h_m),
            csv_escape(&self.model_id),
            fmt_opt(self.epsilon),
            fmt_opt(self.lambda_star_per_km2),
            self.lambda_star_status,
            fmt_opt(self.lambda_dagger_per_km2),
            self.lambda_dagger_status,
            self.method,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

pub fn write_records<T: Serialize + CsvRow>(
    records: &[T],
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{}", T::header())?;
            for r in records {
                writeln!(out, "{}", r.row())?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, records)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
