//! Run outputs: the JSON manifest and the plot-ready CSV table.

use std::path::Path;

use serde::Serialize;

use crate::config::Verdict;
use ulab_core::report::InequalityReport;

/// Everything one run produced, echoed with provenance.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub timestamp: String,
    pub experiment: String,
    pub config: serde_json::Value,
    pub report: InequalityReport,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

impl RunManifest {
    pub fn new(config: serde_json::Value, report: InequalityReport, verdicts: Vec<Verdict>) -> Self {
        let passed = verdicts.iter().all(|v| v.pass);
        Self {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            experiment: report.experiment.clone(),
            config,
            report,
            verdicts,
            passed,
        }
    }

    pub fn write_json(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// RFC-4180 CSV with CRLF records, `.` decimal separator, and 17
    /// significant digits; byte-identical across runs with the same
    /// config and seed.
    pub fn write_csv(&self, path: &Path) -> anyhow::Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_path(path)?;
        writer.write_record(["parameter", "lhs", "rhs", "ratio"])?;
        for row in &self.report.rows {
            writer.write_record([
                format_float(row.parameter),
                format_float(row.lhs),
                format_float(row.rhs),
                format_float(row.ratio),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// 17 significant digits in scientific notation.
fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
        assert_eq!(format_float(1.0 / 3.0), "3.3333333333333331e-1");
    }
}
