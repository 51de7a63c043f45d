//! Experiment reports: per-sample `(parameter, lhs, rhs, ratio)` rows with
//! fitted-slope and max-ratio summaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sample of an inequality sweep. `ratio = lhs / rhs` whenever
/// `rhs > 0`; `degenerate` marks 0/0 rows, which are kept, never dropped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub parameter: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl ReportRow {
    pub fn new(parameter: f64, lhs: f64, rhs: f64) -> Self {
        if rhs > 0.0 {
            Self { parameter, lhs, rhs, ratio: lhs / rhs, degenerate: false }
        } else {
            Self { parameter, lhs, rhs, ratio: 0.0, degenerate: true }
        }
    }

    /// As [`ReportRow::new`], but a pair that vanishes to within `floor`
    /// (a 0/0 up to rounding noise) is flagged degenerate.
    pub fn new_with_floor(parameter: f64, lhs: f64, rhs: f64, floor: f64) -> Self {
        if lhs.abs() <= floor && rhs.abs() <= floor {
            Self { parameter, lhs, rhs, ratio: 0.0, degenerate: true }
        } else {
            Self::new(parameter, lhs, rhs)
        }
    }
}

/// Least-squares line fit on `(log parameter, log ratio)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
    pub window_lo: f64,
    pub window_hi: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Summary {
    pub max_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_slope: Option<SlopeFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_slope: Option<f64>,
    /// Named scalar diagnostics (recorded constants, drift, flags).
    #[serde(default, skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub extras: std::collections::BTreeMap<String, f64>,
}

/// Full outcome of one experiment: rows sorted by parameter, a summary,
/// and the configuration echo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub experiment: String,
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
    pub metadata: serde_json::Value,
}

impl InequalityReport {
    pub fn new(experiment: impl Into<String>, mut rows: Vec<ReportRow>, metadata: serde_json::Value) -> Self {
        rows.sort_by(|a, b| a.parameter.partial_cmp(&b.parameter).unwrap());
        let max_ratio =
            rows.iter().filter(|r| !r.degenerate).fold(0.0f64, |m, r| m.max(r.ratio));
        Self {
            experiment: experiment.into(),
            rows,
            summary: Summary { max_ratio, ..Summary::default() },
            metadata,
        }
    }

    /// Fits `log ratio ~ log parameter` over the trailing `window_octaves`
    /// dyads of the parameter range (the asymptotic regime) and stores the
    /// fit in the summary.
    pub fn fit_slope(&mut self, window_octaves: u32, target: Option<f64>) -> Result<&SlopeFit> {
        let max_param = self
            .rows
            .iter()
            .filter(|r| !r.degenerate)
            .fold(0.0f64, |m, r| m.max(r.parameter));
        if max_param <= 0.0 {
            return Err(Error::numerical("no usable rows for a slope fit"));
        }
        let cutoff = max_param / 2.0f64.powi(window_octaves as i32) * (1.0 - 1e-12);
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| !r.degenerate && r.parameter >= cutoff && r.ratio > 0.0)
            .map(|r| (r.parameter.ln(), r.ratio.ln()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::numerical(format!(
                "slope fit needs >= 2 points in the window, found {}",
                pts.len()
            )));
        }
        let n = pts.len() as f64;
        let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
        let slope = sxy / sxx;
        let intercept = mean_y - slope * mean_x;
        let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let stderr = if pts.len() > 2 {
            (ssr / (n - 2.0) / sxx).sqrt()
        } else {
            0.0
        };
        self.summary.fitted_slope = Some(SlopeFit {
            slope,
            stderr,
            points: pts.len(),
            window_lo: cutoff,
            window_hi: max_param,
        });
        self.summary.target_slope = target;
        Ok(self.summary.fitted_slope.as_ref().unwrap())
    }

    /// Acceptance test for a fitted slope: `|fitted - target| <=
    /// max(rel_tol * |target|, 2 * stderr)`.
    pub fn slope_within(&self, rel_tol: f64) -> Option<bool> {
        let fit = self.summary.fitted_slope.as_ref()?;
        let target = self.summary.target_slope?;
        Some((fit.slope - target).abs() <= (rel_tol * target.abs()).max(2.0 * fit.stderr))
    }

    /// Ratio of the max ratio over the last dyad of the parameter range to
    /// the max over the dyad before it; a boundedness drift indicator.
    pub fn last_dyad_drift(&self) -> Option<f64> {
        let max_param = self
            .rows
            .iter()
            .filter(|r| !r.degenerate)
            .fold(0.0f64, |m, r| m.max(r.parameter));
        if max_param <= 0.0 {
            return None;
        }
        let mid = max_param / 2.0 * (1.0 + 1e-12);
        let lo_cut = max_param / 4.0 * (1.0 - 1e-12);
        let last = self
            .rows
            .iter()
            .filter(|r| !r.degenerate && r.parameter > mid)
            .fold(0.0f64, |m, r| m.max(r.ratio));
        let prev = self
            .rows
            .iter()
            .filter(|r| !r.degenerate && r.parameter >= lo_cut && r.parameter <= mid)
            .fold(0.0f64, |m, r| m.max(r.ratio));
        if prev > 0.0 && last > 0.0 {
            Some(last / prev)
        } else {
            None
        }
    }

    pub fn set_extra(&mut self, key: impl Into<String>, value: f64) {
        self.summary.extras.insert(key.into(), value);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn power_law_rows(exponent: f64, noise: f64) -> Vec<ReportRow> {
        (3..=9)
            .map(|e| {
                let n = 2.0f64.powi(e);
                let ratio = 3.0 * n.powf(exponent) * (1.0 + noise * (e as f64).sin());
                ReportRow::new(n, ratio, 1.0)
            })
            .collect()
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let mut rep = InequalityReport::new("t", power_law_rows(0.25, 0.0), serde_json::json!({}));
        let fit = rep.fit_slope(3, Some(0.25)).unwrap().clone();
        assert_relative_eq!(fit.slope, 0.25, max_relative = 1e-12);
        assert!(fit.stderr < 1e-12);
        assert_eq!(fit.points, 4);
        assert_eq!(rep.slope_within(0.1), Some(true));
    }

    #[test]
    fn slope_stderr_covers_noise() {
        let mut rep = InequalityReport::new("t", power_law_rows(0.5, 0.01), serde_json::json!({}));
        let fit = rep.fit_slope(4, Some(0.5)).unwrap();
        assert!(fit.stderr > 0.0);
        assert!((fit.slope - 0.5).abs() < 0.05);
    }

    #[test]
    fn degenerate_rows_flagged_and_kept() {
        let rows = vec![ReportRow::new(1.0, 0.0, 0.0), ReportRow::new(2.0, 1.0, 2.0)];
        let rep = InequalityReport::new("t", rows, serde_json::json!({}));
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows[0].degenerate);
        assert_relative_eq!(rep.summary.max_ratio, 0.5);
    }

    #[test]
    fn drift_of_flat_ratio_is_one() {
        let rows: Vec<ReportRow> =
            (2..=8).map(|e| ReportRow::new(2.0f64.powi(e), 7.0, 1.0)).collect();
        let rep = InequalityReport::new("t", rows, serde_json::json!({}));
        assert_relative_eq!(rep.last_dyad_drift().unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn rows_sorted_by_parameter() {
        let rows = vec![ReportRow::new(4.0, 1.0, 1.0), ReportRow::new(1.0, 2.0, 1.0)];
        let rep = InequalityReport::new("t", rows, serde_json::json!({}));
        assert!(rep.rows[0].parameter < rep.rows[1].parameter);
    }
}
