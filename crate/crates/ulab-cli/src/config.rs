//! Experiment configuration: a single JSON document with an `experiment`
//! tag, kind-specific `params`, optional assertions, and a seed.
//!
//! Unknown fields are rejected at every level so configs stay diffable
//! and typo-proof.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use ulab_core::error::Error as CoreError;
use ulab_core::experiments::{
    hardy_littlewood_experiment, landau_experiment, landau_sharpness_experiment, nikolskii_check,
    two_weight_markov_check, ulyanov_k_experiment, ulyanov_moduli_experiment,
    HardyLittlewoodConfig, LandauConfig, LandauSharpnessConfig, NikolskiiConfig,
    TwoWeightMarkovConfig, UlyanovKConfig, UlyanovModuliConfig,
};
use ulab_core::funcs::FunctionConfig;
use ulab_core::report::{InequalityReport, ReportRow};
use ulab_core::smoothness::{
    dt_modulus, k_phi_realized, k_spectral_direct, k_spectral_realized, theorem41_check,
    SmoothnessQuery,
};
use ulab_core::weights::{JacobiIndex, Lp, WeightExponents};
use ulab_core::BasisPolynomial;

/// Top-level config document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// One of: landau | landau-sharpness | hardy-littlewood | ulyanov-k |
    /// ulyanov-moduli | nikolskii | two-weight-markov | modulus |
    /// kfunctional | expand.
    pub experiment: String,
    pub params: Value,
    #[serde(default)]
    pub assert: AssertSpec,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Assertions evaluated after the run; all optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertSpec {
    /// Relative slope tolerance against the report's target slope
    /// (the check also passes within twice the fit's standard error).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_rel_tol: Option<f64>,
    /// Overrides the target slope (diagnostics / negative tests).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_target: Option<f64>,
    /// Upper bound on the summary max ratio.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    /// Upper bound on the last-dyad drift of the ratio.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_dyad_drift: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Evaluation-only config: the Ditzian-Totik modulus over a `t`-grid,
/// optionally against the phi-K-functional realization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusConfig {
    pub f: FunctionConfig,
    pub r: u32,
    pub p: Lp,
    pub a: f64,
    pub b: f64,
    pub t_grid: Vec<f64>,
    #[serde(default = "default_h_grid")]
    pub h_grid: usize,
    #[serde(default = "default_x_resolution")]
    pub x_resolution: usize,
    /// When set, rhs of each row is the phi-K realization at the same t.
    #[serde(default)]
    pub compare_kphi: bool,
}

fn default_h_grid() -> usize {
    32
}

fn default_x_resolution() -> usize {
    1024
}

/// Evaluation / diagnostic config for the spectral K-functional lane.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KfunctionalConfig {
    /// "realized" | "direct" | "theorem41"
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<FunctionConfig>,
    pub r: f64,
    pub p: Lp,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Mode sweep bound for the theorem41 variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
}

fn default_budget() -> usize {
    8
}

/// Expansion dump: Fourier-Jacobi coefficients of a function.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpandConfig {
    pub f: FunctionConfig,
    pub alpha: f64,
    pub beta: f64,
    pub degree: usize,
}

fn config_err(e: impl std::fmt::Display) -> CoreError {
    CoreError::invalid(e.to_string())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CoreError> {
        serde_json::from_str(text).map_err(config_err)
    }

    /// Applies a dotted-path override (`params.eps=0.3`) onto the document.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), CoreError> {
        let (path, raw) = spec
            .split_once('=')
            .ok_or_else(|| config_err(format!("override {spec:?} must look like key=value")))?;
        let value: Value =
            serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut doc = serde_json::to_value(&*self).map_err(config_err)?;
        let parts: Vec<&str> = path.split('.').collect();
        let (last, init) = parts.split_last().expect("split produced at least one part");
        let mut cursor = &mut doc;
        for part in init {
            let obj = cursor
                .as_object_mut()
                .ok_or_else(|| config_err(format!("override path {path:?} hits a non-object")))?;
            cursor = obj.entry(part.to_string()).or_insert(Value::Object(Default::default()));
        }
        cursor
            .as_object_mut()
            .ok_or_else(|| config_err(format!("override path {path:?} hits a non-object")))?
            .insert(last.to_string(), value);
        *self = serde_json::from_value(doc).map_err(config_err)?;
        Ok(())
    }

    /// Runs the configured experiment and evaluates the assertions.
    pub fn execute(&self) -> Result<(InequalityReport, Vec<Verdict>), CoreError> {
        let report = self.run_report()?;
        let verdicts = self.verdicts(&report);
        Ok((report, verdicts))
    }

    fn run_report(&self) -> Result<InequalityReport, CoreError> {
        let params = self.params.clone();
        match self.experiment.as_str() {
            "landau" => {
                let cfg: LandauConfig = serde_json::from_value(params).map_err(config_err)?;
                landau_experiment(&cfg)
            }
            "landau-sharpness" => {
                let cfg: LandauSharpnessConfig =
                    serde_json::from_value(params).map_err(config_err)?;
                landau_sharpness_experiment(&cfg)
            }
            "hardy-littlewood" => {
                let cfg: HardyLittlewoodConfig =
                    serde_json::from_value(params).map_err(config_err)?;
                hardy_littlewood_experiment(&cfg)
            }
            "ulyanov-k" => {
                let cfg: UlyanovKConfig = serde_json::from_value(params).map_err(config_err)?;
                ulyanov_k_experiment(&cfg)
            }
            "ulyanov-moduli" => {
                let cfg: UlyanovModuliConfig =
                    serde_json::from_value(params).map_err(config_err)?;
                ulyanov_moduli_experiment(&cfg)
            }
            "nikolskii" => {
                let mut cfg: NikolskiiConfig = serde_json::from_value(params).map_err(config_err)?;
                if let Some(seed) = self.seed {
                    cfg.seed = seed;
                }
                nikolskii_check(&cfg)
            }
            "two-weight-markov" => {
                let mut cfg: TwoWeightMarkovConfig =
                    serde_json::from_value(params).map_err(config_err)?;
                if let Some(seed) = self.seed {
                    cfg.seed = seed;
                }
                two_weight_markov_check(&cfg)
            }
            "modulus" => {
                let cfg: ModulusConfig = serde_json::from_value(params).map_err(config_err)?;
                run_modulus(&cfg)
            }
            "kfunctional" => {
                let cfg: KfunctionalConfig = serde_json::from_value(params).map_err(config_err)?;
                run_kfunctional(&cfg)
            }
            "expand" => {
                let cfg: ExpandConfig = serde_json::from_value(params).map_err(config_err)?;
                run_expand(&cfg)
            }
            other => Err(config_err(format!("unknown experiment kind {other:?}"))),
        }
    }

    fn verdicts(&self, report: &InequalityReport) -> Vec<Verdict> {
        let mut out = Vec::new();
        if let Some(target) = self.assert.slope_target.or(report.summary.target_slope) {
            if self.assert.slope_rel_tol.is_some() || self.assert.slope_target.is_some() {
                let tol = self.assert.slope_rel_tol.unwrap_or(0.1);
                let pass = report.summary.fitted_slope.as_ref().is_some_and(|fit| {
                    (fit.slope - target).abs() <= (tol * target.abs()).max(2.0 * fit.stderr)
                });
                let detail = match &report.summary.fitted_slope {
                    Some(fit) => format!(
                        "fitted {:.6} vs target {target:.6} (tol {tol}, stderr {:.2e})",
                        fit.slope, fit.stderr
                    ),
                    None => "no fitted slope in the report".to_string(),
                };
                out.push(Verdict { name: "slope".into(), pass, detail });
            }
        }
        if let Some(bound) = self.assert.max_ratio {
            let pass = report.summary.max_ratio <= bound;
            out.push(Verdict {
                name: "max-ratio".into(),
                pass,
                detail: format!("max ratio {:.6e} vs bound {bound:.6e}", report.summary.max_ratio),
            });
        }
        if let Some(bound) = self.assert.last_dyad_drift {
            let drift = report.last_dyad_drift();
            let pass = drift.is_some_and(|d| d <= bound);
            out.push(Verdict {
                name: "last-dyad-drift".into(),
                pass,
                detail: format!("drift {drift:?} vs bound {bound}"),
            });
        }
        out
    }
}

fn run_modulus(cfg: &ModulusConfig) -> Result<InequalityReport, CoreError> {
    let f = cfg.f.build()?;
    let weight = WeightExponents::new(cfg.a, cfg.b)?;
    let basis: JacobiIndex = weight.into();
    let mut rows = Vec::with_capacity(cfg.t_grid.len());
    for &t in &cfg.t_grid {
        let q = SmoothnessQuery::new(&f, cfg.r as f64, t, cfg.p, weight, basis)?;
        let w = dt_modulus(&q, cfg.h_grid, cfg.x_resolution)?;
        let rhs = if cfg.compare_kphi { k_phi_realized(&q)? } else { 1.0 };
        rows.push(ReportRow::new(t, w, rhs));
    }
    Ok(InequalityReport::new(
        "modulus",
        rows,
        serde_json::to_value(cfg).map_err(config_err)?,
    ))
}

fn run_kfunctional(cfg: &KfunctionalConfig) -> Result<InequalityReport, CoreError> {
    let weight = WeightExponents::new(cfg.a, cfg.b)?;
    let basis = JacobiIndex::new(cfg.alpha, cfg.beta)?;
    match cfg.variant.as_str() {
        "realized" | "direct" => {
            let f = cfg
                .f
                .as_ref()
                .ok_or_else(|| config_err("kfunctional realized/direct needs a function f"))?
                .build()?;
            let mut rows = Vec::with_capacity(cfg.t_grid.len());
            for &t in &cfg.t_grid {
                let q = SmoothnessQuery::new(&f, cfg.r, t, cfg.p, weight, basis)?;
                let (lhs, rhs) = if cfg.variant == "realized" {
                    (k_spectral_realized(&q)?, 1.0)
                } else {
                    // direct upper bound against the realization
                    (k_spectral_direct(&q, cfg.budget)?, k_spectral_realized(&q)?)
                };
                rows.push(ReportRow::new(t, lhs, rhs));
            }
            Ok(InequalityReport::new(
                format!("kfunctional-{}", cfg.variant),
                rows,
                serde_json::to_value(cfg).map_err(config_err)?,
            ))
        }
        "theorem41" => {
            let k_max = cfg.k_max.unwrap_or(64);
            let r = cfg.r as usize;
            if cfg.r.fract() != 0.0 || r == 0 {
                return Err(config_err("theorem41 variant needs integer r >= 1"));
            }
            let mut rows = Vec::new();
            for k in 0..=k_max {
                let q = BasisPolynomial::unit(basis, k)?;
                let (first, second) = theorem41_check(&q, r, cfg.p, weight, basis)?;
                match (first.value(), second.value()) {
                    (Some(v1), Some(v2)) => {
                        rows.push(ReportRow::new(k as f64, v1, 1.0));
                        rows.push(ReportRow::new(k as f64 + 0.5, v2, 1.0));
                    }
                    _ => rows.push(ReportRow::new_with_floor(k as f64, 0.0, 0.0, 1.0)),
                }
            }
            Ok(InequalityReport::new(
                "kfunctional-theorem41",
                rows,
                serde_json::to_value(cfg).map_err(config_err)?,
            ))
        }
        other => Err(config_err(format!("unknown kfunctional variant {other:?}"))),
    }
}

fn run_expand(cfg: &ExpandConfig) -> Result<InequalityReport, CoreError> {
    let f = cfg.f.build()?;
    let basis = JacobiIndex::new(cfg.alpha, cfg.beta)?;
    let coeffs = ulab_core::analyze(&f, basis, cfg.degree)?;
    let rows: Vec<ReportRow> = coeffs
        .materialized()
        .iter()
        .enumerate()
        .map(|(k, &c)| ReportRow::new(k as f64, c, 1.0))
        .collect();
    let mut report = InequalityReport::new(
        "expand",
        rows,
        serde_json::to_value(cfg).map_err(config_err)?,
    );
    report.metadata["coefficients"] = serde_json::to_value(coeffs.materialized()).map_err(config_err)?;
    Ok(report)
}
