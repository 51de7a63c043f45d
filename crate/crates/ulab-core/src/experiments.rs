//! Experiment drivers that sweep the inequality statements numerically:
//! Landau-type bounds and their sharpness exponents, Hardy-Littlewood
//! boundedness of the fractional integral, the sharp Ulyanov inequalities
//! for K-functionals and moduli, and the Nikolskii / two-weight polynomial
//! sweeps used in their proofs.
//!
//! Every driver validates its hypotheses first and returns a named
//! [`Error::Hypothesis`] on failure; reports are only emitted for
//! certified configurations.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approximation::best_approx;
use crate::error::{Error, Result};
use crate::funcs::{FunctionConfig, FunctionSpec};
use crate::jacobi::{BasisPolynomial, MAX_DEGREE};
use crate::quad::{lp_norm, product_norm};
use crate::report::{InequalityReport, ReportRow};
use crate::smoothness::{dt_modulus, KEvaluator, SmoothnessQuery};
use crate::spectral::{analyze, fractional_integral, partial_sum};
use crate::weights::{Interval, JacobiIndex, Lp, WeightExponents};

/// Default seed recorded in every report that draws random polynomials.
pub const DEFAULT_SEED: u64 = 7;
/// Trailing octaves of the parameter range used by slope fits.
pub const DEFAULT_FIT_OCTAVES: u32 = 3;

fn check(cond: bool, name: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::hypothesis(name))
    }
}

/// The witness family `f_n(x) = ((x + 1/n - 1)_+)^m` over a dyadic-style
/// grid of `n` values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharpnessFamilySpec {
    pub m: u32,
    pub n_grid: Vec<u32>,
}

impl SharpnessFamilySpec {
    pub fn validate(&self) -> Result<()> {
        check(self.n_grid.len() >= 4, "n_grid must have >= 4 points")?;
        check(
            self.n_grid.windows(2).all(|w| w[0] < w[1]),
            "n_grid must be strictly increasing",
        )?;
        let lo = *self.n_grid.first().unwrap() as f64;
        let hi = *self.n_grid.last().unwrap() as f64;
        check(hi >= 4.0 * lo, "n_grid must span at least two dyadic decades")?;
        check(self.m >= 1, "family power m must be >= 1")
    }

    pub fn member(&self, n: u32) -> Result<FunctionSpec> {
        FunctionSpec::bump(n, self.m)
    }
}

// ---------------------------------------------------------------------------
// Landau-type inequality and its sharpness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandauConfig {
    pub p: Lp,
    pub q: Lp,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub r: u32,
    pub k: u32,
    /// Smooth validation family: orthonormal Legendre modes ...
    #[serde(default)]
    pub psi_degrees: Vec<usize>,
    /// ... and cosine frequencies.
    #[serde(default)]
    pub cosine_freqs: Vec<f64>,
}

fn check_landau_common(p: Lp, q: Lp, a: f64, b: f64, c: f64, d: f64, k: u32) -> Result<()> {
    check(p.value() >= 1.0, "1 <= p")?;
    check(p.value() <= q.value(), "p <= q")?;
    check(!(p.is_infinity() && q.is_infinity()), "(p, q) != (inf, inf)")?;
    check(a > -q.reciprocal(), "a > -1/q")?;
    check(b > -q.reciprocal(), "b > -1/q")?;
    check(c > -p.reciprocal(), "c > -1/p")?;
    check(d > -p.reciprocal(), "d > -1/p")?;
    check(k >= 1, "k >= 1")
}

/// Checks the ratio of the Landau-type inequality
/// `||f^{(r)} w^{(a,b)}||_q <= C (||f w^{(c,d)}||_p + ||f^{(r+k)} w^{(a+h,b+h)}||_p)`
/// with `h = k - (1/p - 1/q)` over a family of smooth functions.
pub fn landau_experiment(cfg: &LandauConfig) -> Result<InequalityReport> {
    check_landau_common(cfg.p, cfg.q, cfg.a, cfg.b, cfg.c, cfg.d, cfg.k)?;
    let h = cfg.k as f64 - (cfg.p.reciprocal() - cfg.q.reciprocal());
    let r = cfg.r as usize;
    let k = cfg.k as usize;

    let mut family: Vec<FunctionSpec> = Vec::new();
    if r >= 1 {
        // a low-degree member with f^{(r)} = 0 exercises the trivial row
        family.push(FunctionSpec::psi(JacobiIndex::legendre(), r - 1)?);
    }
    for &j in &cfg.psi_degrees {
        family.push(FunctionSpec::psi(JacobiIndex::legendre(), j)?);
    }
    for &omega in &cfg.cosine_freqs {
        family.push(FunctionSpec::cosine(omega)?);
    }
    check(!family.is_empty(), "validation family must be nonempty")?;

    let upper = WeightExponents::new(cfg.a, cfg.b)?;
    let lower = WeightExponents::new(cfg.c, cfg.d)?;
    let shifted = WeightExponents::new(cfg.a + h, cfg.b + h)?;

    let rows = family
        .par_iter()
        .enumerate()
        .map(|(i, f)| -> Result<ReportRow> {
            let lhs = product_norm(&f.derivative(r)?, upper, cfg.q, Interval::full(), 1)?;
            let rhs = product_norm(f, lower, cfg.p, Interval::full(), 1)?
                + product_norm(&f.derivative(r + k)?, shifted, cfg.p, Interval::full(), 1)?;
            Ok(ReportRow::new((i + 1) as f64, lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(InequalityReport::new("landau", rows, serde_json::to_value(cfg).unwrap()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandauSharpnessConfig {
    pub p: Lp,
    pub q: Lp,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub r: u32,
    pub k: u32,
    pub eps: f64,
    pub family: SharpnessFamilySpec,
    #[serde(default = "default_fit_octaves")]
    pub fit_octaves: u32,
}

fn default_fit_octaves() -> u32 {
    DEFAULT_FIT_OCTAVES
}

/// Sharpness probe: with the upper weight perturbed by `eps`, the ratio
/// `||f_n^{(r)} w^{(a,b)}||_q / (||f_n w^{(c,d)}||_1 + ||f_n^{(r+k)} w^{(a+h+eps,b+h)}||_p)`
/// grows like `n^eps`; the report fits the log-log slope against `eps`.
pub fn landau_sharpness_experiment(cfg: &LandauSharpnessConfig) -> Result<InequalityReport> {
    check_landau_common(cfg.p, cfg.q, cfg.a, cfg.b, cfg.c, cfg.d, cfg.k)?;
    let ip = cfg.p.reciprocal();
    let iq = cfg.q.reciprocal();
    check(cfg.a - cfg.c < cfg.r as f64 + (ip - iq), "a - c < r + (1/p - 1/q)")?;
    check(cfg.eps > 0.0, "eps > 0")?;
    check(cfg.eps <= cfg.c - cfg.a + cfg.r as f64 + ip - iq, "eps <= c - a + r + 1/p - 1/q")?;
    cfg.family.validate()?;
    check(cfg.family.m > cfg.r + cfg.k, "m > r + k")?;

    let h = cfg.k as f64 - (ip - iq);
    let r = cfg.r as usize;
    let k = cfg.k as usize;
    let upper = WeightExponents::new(cfg.a, cfg.b)?;
    let lower = WeightExponents::new(cfg.c, cfg.d)?;
    let perturbed = WeightExponents::new(cfg.a + h + cfg.eps, cfg.b + h)?;

    let rows = cfg
        .family
        .n_grid
        .par_iter()
        .map(|&n| -> Result<ReportRow> {
            let f = cfg.family.member(n)?;
            let lhs = product_norm(&f.derivative(r)?, upper, cfg.q, Interval::full(), 1)?;
            let rhs = product_norm(&f, lower, Lp::Finite(1.0), Interval::full(), 1)?
                + product_norm(&f.derivative(r + k)?, perturbed, cfg.p, Interval::full(), 1)?;
            Ok(ReportRow::new(n as f64, lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report =
        InequalityReport::new("landau-sharpness", rows, serde_json::to_value(cfg).unwrap());
    report.fit_slope(cfg.fit_octaves, Some(cfg.eps))?;
    Ok(report)
}

/// Norm asymptotics of one member of the witness family:
/// `||f_n w^{(c,d)}||_p ~ n^{-(m + c + 1/p)}` (a per-norm slope probe used
/// by the acceptance suite).
pub fn sharpness_norm_row(n: u32, m: u32, factor: WeightExponents, p: Lp) -> Result<ReportRow> {
    let f = FunctionSpec::bump(n, m)?;
    let norm = product_norm(&f, factor, p, Interval::full(), 1)?;
    Ok(ReportRow::new(n as f64, norm, 1.0))
}

// ---------------------------------------------------------------------------
// Hardy-Littlewood boundedness of the fractional integral
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyLittlewoodConfig {
    pub p: f64,
    pub q: f64,
    /// Norm weight exponents `(a, b)`.
    pub a: f64,
    pub b: f64,
    /// Operator basis `(alpha, beta)`.
    pub alpha: f64,
    pub beta: f64,
    /// Fractional order; defaults to the critical `(2a+2)(1/p - 1/q)`.
    #[serde(default)]
    pub sigma: Option<f64>,
    pub family: SharpnessFamilySpec,
    /// Analysis truncation degree; defaults to `4 * max(n_grid)`.
    #[serde(default)]
    pub truncation: Option<usize>,
    /// Also probe `sigma / 2` (reported, never asserted).
    #[serde(default)]
    pub explore_subcritical: bool,
}

impl HardyLittlewoodConfig {
    pub fn critical_sigma(&self) -> f64 {
        (2.0 * self.a + 2.0) * (1.0 / self.p - 1.0 / self.q)
    }

    /// Moment-condition count `max(0,[A]) + max(0,[B])` with
    /// `A = (a+1)/p - alpha`, `B = (b+1)/p - beta`.
    pub fn moment_count(&self) -> usize {
        let a_q = (self.a + 1.0) / self.p - self.alpha;
        let b_q = (self.b + 1.0) / self.p - self.beta;
        let m = if a_q > 0.0 { a_q.floor() as usize } else { 0 };
        let n = if b_q > 0.0 { b_q.floor() as usize } else { 0 };
        m + n
    }

    fn validate(&self) -> Result<f64> {
        check(1.0 < self.p && self.p < self.q && self.q.is_finite(), "1 < p < q < inf")?;
        check(self.a >= self.b && self.b > -1.0, "a >= b > -1")?;
        let sigma = self.sigma.unwrap_or_else(|| self.critical_sigma());
        check(sigma > 0.0, "sigma > 0")?;
        if self.alpha == self.a && self.beta == self.b {
            // the same-basis case
            check(self.a + self.b >= -1.0, "a + b >= -1")?;
            check(sigma >= self.critical_sigma() - 1e-12, "sigma >= (2a+2)(1/p - 1/q)")?;
            return Ok(sigma);
        }
        check(self.a >= -0.5, "a >= -1/2")?;
        check(self.alpha >= self.beta && self.beta > -1.0, "alpha >= beta > -1")?;
        let gap = self.alpha - self.beta;
        check(self.p * gap <= 2.0 * (self.a - self.b) + 1e-12, "p(alpha-beta) <= 2(a-b)")?;
        check(2.0 * (self.a - self.b) <= self.q * gap + 1e-12, "2(a-b) <= q(alpha-beta)")?;
        let a_q = (self.a + 1.0) / self.p - self.alpha;
        let b_q = (self.b + 1.0) / self.p - self.beta;
        check(
            !(a_q > 0.0 && a_q.fract() == 0.0),
            "A = (a+1)/p - alpha must not be a positive integer",
        )?;
        check(
            !(b_q > 0.0 && b_q.fract() == 0.0),
            "B = (b+1)/p - beta must not be a positive integer",
        )?;
        let case_ok = self.alpha == self.a
            || (self.alpha > self.a && self.q > 2.0)
            || (self.alpha < self.a && self.p < 2.0);
        check(case_ok, "alpha = a, or alpha > a with q > 2, or alpha < a with p < 2")?;
        check(sigma >= self.critical_sigma() - 1e-12, "sigma >= (2a+2)(1/p - 1/q)")?;
        Ok(sigma)
    }
}

fn hardy_littlewood_rows(
    cfg: &HardyLittlewoodConfig,
    sigma: f64,
    truncation: usize,
) -> Result<Vec<ReportRow>> {
    let weight = WeightExponents::new(cfg.a, cfg.b)?;
    let basis = JacobiIndex::new(cfg.alpha, cfg.beta)?;
    let moments = cfg.moment_count();
    cfg.family
        .n_grid
        .par_iter()
        .map(|&n| -> Result<ReportRow> {
            let f = cfg.family.member(n)?;
            let coeffs = analyze(&f, basis, truncation)?;
            // enforce the moment conditions by subtracting the low partial sum
            let (projected, tilde) = if moments > 0 {
                let head = partial_sum(&coeffs, moments - 1).to_poly();
                let mut materialized = coeffs.materialized();
                for c in materialized.iter_mut().take(moments) {
                    *c = 0.0;
                }
                let projected = crate::spectral::SpectralCoeffs::new(
                    basis,
                    materialized,
                    coeffs.truncation_tol,
                )?;
                (projected, FunctionSpec::minus_poly(&f, head))
            } else {
                (coeffs, f)
            };
            let smoothed = fractional_integral(&projected, sigma)?.to_poly();
            let lhs = lp_norm(&smoothed, Lp::Finite(cfg.q), weight, Interval::full(), 1)?;
            let rhs = lp_norm(&tilde, Lp::Finite(cfg.p), weight, Interval::full(), 1)?;
            Ok(ReportRow::new(n as f64, lhs, rhs))
        })
        .collect()
}

/// Boundedness sweep for the fractional integral:
/// `||I_sigma f||_{L_q(w^{(a,b)})} <= C ||f||_{L_p(w^{(a,b)})}` over the
/// witness family, with the moment conditions enforced by projection.
pub fn hardy_littlewood_experiment(cfg: &HardyLittlewoodConfig) -> Result<InequalityReport> {
    let sigma = cfg.validate()?;
    cfg.family.validate()?;
    let n_max = *cfg.family.n_grid.last().unwrap() as usize;
    let truncation = cfg.truncation.unwrap_or(4 * n_max).min(MAX_DEGREE);

    let rows = hardy_littlewood_rows(cfg, sigma, truncation)?;
    let mut report =
        InequalityReport::new("hardy-littlewood", rows, serde_json::to_value(cfg).unwrap());
    report.set_extra("sigma", sigma);
    report.set_extra("moment_count", cfg.moment_count() as f64);
    if let Some(d) = report.last_dyad_drift() {
        report.set_extra("last_dyad_drift", d);
    }
    if cfg.explore_subcritical {
        let sub_rows = hardy_littlewood_rows(cfg, sigma / 2.0, truncation)?;
        let sub = InequalityReport::new("sub", sub_rows, serde_json::Value::Null);
        report.set_extra("subcritical_sigma", sigma / 2.0);
        report.set_extra("subcritical_max_ratio", sub.summary.max_ratio);
        if let Some(d) = sub.last_dyad_drift() {
            report.set_extra("subcritical_last_dyad_drift", d);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Sharp Ulyanov inequalities
// ---------------------------------------------------------------------------

/// Midpoints (in log-u) and the log step of a geometric integration grid.
fn log_grid(u_min: f64, u_max: f64, per_dyad: usize) -> (Vec<f64>, f64) {
    let octaves = (u_max / u_min).log2();
    let count = ((octaves * per_dyad as f64).ceil() as usize).max(1);
    let dlog = (u_max / u_min).ln() / count as f64;
    let mids = (0..count).map(|j| u_min * ((j as f64 + 0.5) * dlog).exp()).collect();
    (mids, dlog)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UlyanovKConfig {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub f: FunctionConfig,
    pub t_grid: Vec<f64>,
    #[serde(default = "default_u_min")]
    pub u_min: f64,
    #[serde(default = "default_u_per_dyad")]
    pub u_per_dyad: usize,
}

fn default_u_min() -> f64 {
    (2.0f64).powi(-12)
}

fn default_u_per_dyad() -> usize {
    16
}

impl UlyanovKConfig {
    pub fn sigma(&self) -> f64 {
        (2.0 * self.a + 2.0) * (1.0 / self.p - 1.0 / self.q)
    }

    fn validate(&self) -> Result<()> {
        check(
            1.0 < self.p && self.p < self.q && self.q.is_finite(),
            "1 < p < q < inf (the K-functional form rejects q = inf)",
        )?;
        check(self.r > 0.0, "r > 0")?;
        check(self.a >= self.b && self.b > -1.0, "a >= b > -1")?;
        check(self.a >= -0.5, "a >= -1/2")?;
        check(self.alpha > -1.0 && self.beta > -1.0, "alpha, beta > -1")?;
        check((self.a + 1.0) / self.p - self.alpha < 1.0, "(a+1)/p - alpha < 1")?;
        check((self.b + 1.0) / self.p - self.beta < 1.0, "(b+1)/p - beta < 1")?;
        if !(self.alpha == self.a && self.beta == self.b) {
            let gap = self.alpha - self.beta;
            check(self.p * gap <= 2.0 * (self.a - self.b) + 1e-12, "p(alpha-beta) <= 2(a-b)")?;
            check(2.0 * (self.a - self.b) <= self.q * gap + 1e-12, "2(a-b) <= q(alpha-beta)")?;
            let case_ok = self.alpha == self.a
                || (self.alpha > self.a && self.q > 2.0)
                || (self.alpha < self.a && self.p < 2.0);
            check(case_ok, "alpha = a, or alpha > a with q > 2, or alpha < a with p < 2")?;
        }
        check(!self.t_grid.is_empty(), "t_grid nonempty")?;
        check(self.t_grid.iter().all(|&t| 0.0 < t && t < 1.0), "t_grid contained in (0, 1)")?;
        check(self.u_min > 0.0 && self.u_min < 1.0, "0 < u_min < 1")?;
        check(self.u_per_dyad >= 2, "u_per_dyad >= 2")
    }
}

/// The sharp Ulyanov inequality for spectral K-functionals:
/// `K^r(f, t)_{L_q} <= C (int_0^t (u^{-sigma} K^{r+sigma}(f, u)_{L_p})^q du/u)^{1/q}`
/// with `sigma = (2a+2)(1/p - 1/q)`.
pub fn ulyanov_k_experiment(cfg: &UlyanovKConfig) -> Result<InequalityReport> {
    cfg.validate()?;
    let sigma = cfg.sigma();
    let rho = cfg.r + sigma;
    let weight = WeightExponents::new(cfg.a, cfg.b)?;
    let basis = JacobiIndex::new(cfg.alpha, cfg.beta)?;
    let f = cfg.f.build()?;

    let t_max = cfg.t_grid.iter().cloned().fold(0.0f64, f64::max);
    let n_lhs = (1.0 / cfg.t_grid.iter().cloned().fold(1.0f64, f64::min)).ceil() as usize;
    let ev_q = KEvaluator::new(&f, Lp::Finite(cfg.q), weight, basis, n_lhs.max(1))?;
    let ev_p = KEvaluator::new(
        &f,
        Lp::Finite(cfg.p),
        weight,
        basis,
        ((1.0 / cfg.u_min).ceil() as usize).min(MAX_DEGREE),
    )?;

    let (mids, dlog) = log_grid(cfg.u_min, t_max, cfg.u_per_dyad);
    // integrand samples (u^{-sigma} K^{r+sigma}(f, u)_p)^q, shared across t
    let samples: Vec<f64> = mids
        .par_iter()
        .map(|&u| -> Result<f64> {
            let k = ev_p.k_realized(rho, u)?;
            Ok((u.powf(-sigma) * k).powf(cfg.q))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut tail_fraction: f64 = 0.0;
    let mut rows = Vec::with_capacity(cfg.t_grid.len());
    for &t in &cfg.t_grid {
        let total: f64 = mids
            .iter()
            .zip(&samples)
            .filter(|&(&u, _)| u < t)
            .map(|(_, &s)| s * dlog)
            .sum();
        let last_dyad: f64 = mids
            .iter()
            .zip(&samples)
            .filter(|&(&u, _)| u < (2.0 * cfg.u_min).min(t))
            .map(|(_, &s)| s * dlog)
            .sum();
        if total > 0.0 {
            tail_fraction = tail_fraction.max(last_dyad / total);
        }
        let rhs = total.powf(1.0 / cfg.q);
        let lhs = ev_q.k_realized(cfg.r, t)?;
        rows.push(ReportRow::new(t, lhs, rhs));
    }

    let mut report = InequalityReport::new("ulyanov-k", rows, serde_json::to_value(cfg).unwrap());
    report.set_extra("sigma", sigma);
    report.set_extra("tail_fraction", tail_fraction);
    if tail_fraction > 0.1 {
        report.set_extra("tail_not_converged", 1.0);
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UlyanovModuliConfig {
    pub p: Lp,
    pub q: Lp,
    pub r: u32,
    pub a: f64,
    pub b: f64,
    pub f: FunctionConfig,
    pub t_grid: Vec<f64>,
    #[serde(default = "default_u_min")]
    pub u_min: f64,
    #[serde(default = "default_u_per_dyad")]
    pub u_per_dyad: usize,
    #[serde(default = "default_h_grid")]
    pub h_grid: usize,
    #[serde(default = "default_x_resolution")]
    pub x_resolution: usize,
}

fn default_h_grid() -> usize {
    32
}

fn default_x_resolution() -> usize {
    1024
}

impl UlyanovModuliConfig {
    pub fn sigma(&self) -> f64 {
        (2.0 * self.a + 2.0) * (self.p.reciprocal() - self.q.reciprocal())
    }

    /// `q` when finite, 1 at `q = inf`.
    pub fn q1(&self) -> f64 {
        match self.q {
            Lp::Finite(q) => q,
            Lp::Infinity => 1.0,
        }
    }

    /// Modulus order on the right-hand side: `r + [sigma]`.
    pub fn rhs_order(&self) -> u32 {
        self.r + self.sigma().floor() as u32
    }

    fn validate(&self) -> Result<()> {
        check(self.a >= self.b && self.b >= 0.0, "a >= b >= 0")?;
        check(self.p.value() >= 1.0, "p >= 1")?;
        check(self.p.value() < self.q.value(), "p < q")?;
        check(self.r >= 1, "r >= 1")?;
        check(!self.t_grid.is_empty(), "t_grid nonempty")?;
        let r_hi = self.rhs_order() as f64;
        check(
            self.t_grid.iter().all(|&t| t > 0.0 && 4.0 * r_hi * r_hi * t * t < 1.0),
            "t_grid small enough for a nonempty inner interval",
        )?;
        check(self.u_min > 0.0 && self.u_min < 1.0, "0 < u_min < 1")?;
        check(self.u_per_dyad >= 2, "u_per_dyad >= 2")
    }
}

/// The sharp Ulyanov inequality for Ditzian-Totik moduli:
/// `w^r(f,t)_{L_q} <= C [int_0^t (u^{-sigma} w^{r+[sigma]}(f,u)_{L_p})^{q1} du/u]^{1/q1}
///  + C t^r E_{r-1}(f)_{L_p}`.
pub fn ulyanov_moduli_experiment(cfg: &UlyanovModuliConfig) -> Result<InequalityReport> {
    cfg.validate()?;
    let sigma = cfg.sigma();
    let q1 = cfg.q1();
    let r_hi = cfg.rhs_order();
    let weight = WeightExponents::new(cfg.a, cfg.b)?;
    let basis: JacobiIndex = weight.into();
    let f = cfg.f.build()?;

    // E_{r-1}: best approximation by degree r-1
    let e_low = best_approx(&f, cfg.r as usize - 1, cfg.p, weight)?.error;
    // scale for flagging 0/0 rows produced by rounding noise
    let f_scale = lp_norm(&f, cfg.p, weight, Interval::full(), 1)?;
    let floor = 1e-10 * (1.0 + f_scale);

    let t_max = cfg.t_grid.iter().cloned().fold(0.0f64, f64::max);
    let (mids, dlog) = log_grid(cfg.u_min, t_max, cfg.u_per_dyad);
    let samples: Vec<f64> = mids
        .par_iter()
        .map(|&u| -> Result<f64> {
            let q = SmoothnessQuery::new(&f, r_hi as f64, u, cfg.p, weight, basis)?;
            let w = dt_modulus(&q, cfg.h_grid, cfg.x_resolution)?;
            Ok((u.powf(-sigma) * w).powf(q1))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut tail_fraction: f64 = 0.0;
    let mut rows = Vec::with_capacity(cfg.t_grid.len());
    for &t in &cfg.t_grid {
        let total: f64 = mids
            .iter()
            .zip(&samples)
            .filter(|&(&u, _)| u < t)
            .map(|(_, &s)| s * dlog)
            .sum();
        let last_dyad: f64 = mids
            .iter()
            .zip(&samples)
            .filter(|&(&u, _)| u < (2.0 * cfg.u_min).min(t))
            .map(|(_, &s)| s * dlog)
            .sum();
        if total > 0.0 {
            tail_fraction = tail_fraction.max(last_dyad / total);
        }
        let rhs = total.powf(1.0 / q1) + t.powi(cfg.r as i32) * e_low;
        let query = SmoothnessQuery::new(&f, cfg.r as f64, t, cfg.q, weight, basis)?;
        let lhs = dt_modulus(&query, cfg.h_grid, cfg.x_resolution)?;
        rows.push(ReportRow::new_with_floor(t, lhs, rhs, floor));
    }

    let mut report =
        InequalityReport::new("ulyanov-moduli", rows, serde_json::to_value(cfg).unwrap());
    report.set_extra("sigma", sigma);
    report.set_extra("q1", q1);
    report.set_extra("rhs_order", r_hi as f64);
    report.set_extra("e_low", e_low);
    report.set_extra("tail_fraction", tail_fraction);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Polynomial-inequality sweeps: Nikolskii and the two-weight bound
// ---------------------------------------------------------------------------

/// Random coefficient vector in `[-1, 1]^(n+1)`.
fn random_poly(basis: JacobiIndex, n: usize, rng: &mut ChaCha8Rng) -> BasisPolynomial {
    let coeffs: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    BasisPolynomial::new(basis, coeffs).expect("finite random coefficients")
}

/// Degrees swept inside one `n`: dyadic subsequence plus `n` itself.
fn mode_subset(n: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut k = 1;
    while k < n {
        out.push(k);
        k *= 2;
    }
    out.push(n);
    out.dedup();
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NikolskiiConfig {
    pub p: Lp,
    pub q: Lp,
    pub a: f64,
    pub b: f64,
    pub n_grid: Vec<u32>,
    #[serde(default = "default_draws")]
    pub random_draws: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_draws() -> usize {
    3
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Nikolskii sweep: `||P_n||_q <= C n^{(2a+2)(1/p - 1/q)} ||P_n||_p` over
/// single modes and seeded random draws; rows carry the per-`n` worst case.
pub fn nikolskii_check(cfg: &NikolskiiConfig) -> Result<InequalityReport> {
    check(cfg.p.value() >= 1.0, "p >= 1")?;
    check(cfg.p.value() < cfg.q.value(), "p < q")?;
    check(!cfg.n_grid.is_empty(), "n_grid nonempty")?;
    let weight = WeightExponents::new(cfg.a, cfg.b)?;
    let basis: JacobiIndex = weight.into();
    let exponent = (2.0 * cfg.a + 2.0) * (cfg.p.reciprocal() - cfg.q.reciprocal());

    let rows = cfg
        .n_grid
        .par_iter()
        .map(|&n| -> Result<ReportRow> {
            let n = n as usize;
            let mut rng =
                ChaCha8Rng::seed_from_u64(cfg.seed ^ (n as u64).wrapping_mul(0x9e3779b9));
            let mut polys: Vec<BasisPolynomial> = mode_subset(n)
                .into_iter()
                .map(|k| BasisPolynomial::unit(basis, k))
                .collect::<Result<_>>()?;
            for _ in 0..cfg.random_draws {
                polys.push(random_poly(basis, n, &mut rng));
            }
            let factor = (n.max(1) as f64).powf(exponent);
            let mut best: Option<ReportRow> = None;
            for poly in &polys {
                let lhs = lp_norm(poly, cfg.q, weight, Interval::full(), 1)?;
                let rhs = factor * lp_norm(poly, cfg.p, weight, Interval::full(), 1)?;
                let row = ReportRow::new(n as f64, lhs, rhs);
                if best.as_ref().is_none_or(|b| row.ratio > b.ratio) {
                    best = Some(row);
                }
            }
            Ok(best.expect("nonempty family"))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = InequalityReport::new("nikolskii", rows, serde_json::to_value(cfg).unwrap());
    report.set_extra("exponent", exponent);
    report.set_extra("seed", cfg.seed as f64);
    if let Some(d) = report.last_dyad_drift() {
        report.set_extra("last_dyad_drift", d);
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoWeightMarkovConfig {
    pub r: u32,
    pub sigma: f64,
    pub p: Lp,
    pub a: f64,
    pub b: f64,
    pub n_grid: Vec<u32>,
    #[serde(default = "default_draws")]
    pub random_draws: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// Two-weight derivative sweep:
/// `||phi^{r+2[sigma]-sigma} P_n^{(r+[sigma])}||_p <=
///  C n^{sigma-[sigma]} ||phi^{r+[sigma]} P_n^{(r+[sigma])}||_p`.
/// Integer `sigma` collapses both sides and the ratio is exactly 1.
pub fn two_weight_markov_check(cfg: &TwoWeightMarkovConfig) -> Result<InequalityReport> {
    check(cfg.sigma >= 0.0, "sigma >= 0")?;
    check(cfg.r >= 1, "r >= 1")?;
    check(!cfg.n_grid.is_empty(), "n_grid nonempty")?;
    let weight = WeightExponents::new(cfg.a, cfg.b)?;
    let basis: JacobiIndex = weight.into();
    let floor_sigma = cfg.sigma.floor();
    let order = cfg.r as usize + floor_sigma as usize;
    let gamma_lhs = cfg.r as f64 + 2.0 * floor_sigma - cfg.sigma;
    let gamma_rhs = cfg.r as f64 + floor_sigma;
    check(gamma_lhs >= 0.0, "phi exponent r + 2[sigma] - sigma >= 0")?;

    let phi_norm = |poly: &BasisPolynomial, gamma: f64| -> Result<f64> {
        let deriv = crate::jacobi::derivative_shift(poly, order);
        match cfg.p {
            Lp::Finite(p) => {
                let shifted =
                    WeightExponents::new(cfg.a + p * gamma / 2.0, cfg.b + p * gamma / 2.0)?;
                crate::quad::weighted_lp_norm(&deriv, p, shifted, Interval::full(), 1)
            }
            Lp::Infinity => {
                let factor = WeightExponents::new(gamma / 2.0, gamma / 2.0)?;
                let wrapped =
                    crate::quad::FnIntegrand::new(move |x| deriv.eval(x) * factor.eval(x));
                crate::quad::sup_norm(&wrapped, Interval::full(), 4096)
            }
        }
    };

    let rows = cfg
        .n_grid
        .par_iter()
        .map(|&n| -> Result<ReportRow> {
            let n = n as usize;
            let mut rng =
                ChaCha8Rng::seed_from_u64(cfg.seed ^ (n as u64).wrapping_mul(0x9e3779b9));
            let mut polys: Vec<BasisPolynomial> = mode_subset(n)
                .into_iter()
                .filter(|&k| k >= order)
                .map(|k| BasisPolynomial::unit(basis, k))
                .collect::<Result<_>>()?;
            for _ in 0..cfg.random_draws {
                polys.push(random_poly(basis, n, &mut rng));
            }
            let factor = (n.max(1) as f64).powf(cfg.sigma - floor_sigma);
            let mut best: Option<ReportRow> = None;
            for poly in &polys {
                let lhs = phi_norm(poly, gamma_lhs)?;
                let rhs = factor * phi_norm(poly, gamma_rhs)?;
                let row = ReportRow::new(n as f64, lhs, rhs);
                let better = match &best {
                    None => true,
                    Some(b) => (b.degenerate && !row.degenerate) || row.ratio > b.ratio,
                };
                if better {
                    best = Some(row);
                }
            }
            Ok(best.unwrap_or(ReportRow::new(n as f64, 0.0, 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report =
        InequalityReport::new("two-weight-markov", rows, serde_json::to_value(cfg).unwrap());
    report.set_extra("phi_exponent_lhs", gamma_lhs);
    report.set_extra("phi_exponent_rhs", gamma_rhs);
    report.set_extra("seed", cfg.seed as f64);
    if let Some(d) = report.last_dyad_drift() {
        report.set_extra("last_dyad_drift", d);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn family_spec_validation() {
        let bad = SharpnessFamilySpec { m: 4, n_grid: vec![8, 16] };
        assert!(bad.validate().is_err());
        let unordered = SharpnessFamilySpec { m: 4, n_grid: vec![8, 8, 16, 32] };
        assert!(unordered.validate().is_err());
        let good = SharpnessFamilySpec { m: 4, n_grid: vec![8, 16, 32, 64] };
        assert!(good.validate().is_ok());
    }

    #[test]
    fn landau_rejects_bad_parameters() {
        let cfg = LandauConfig {
            p: Lp::Finite(4.0),
            q: Lp::Finite(2.0),
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            r: 1,
            k: 1,
            psi_degrees: vec![4],
            cosine_freqs: vec![],
        };
        match landau_experiment(&cfg) {
            Err(Error::Hypothesis { condition }) => assert!(condition.contains("p <= q")),
            other => panic!("expected hypothesis failure, got {other:?}"),
        }
    }

    #[test]
    fn landau_low_degree_gives_zero_lhs() {
        let cfg = LandauConfig {
            p: Lp::Finite(2.0),
            q: Lp::Finite(4.0),
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            r: 2,
            k: 1,
            psi_degrees: vec![],
            cosine_freqs: vec![1.0],
        };
        let rep = landau_experiment(&cfg).unwrap();
        // first family member is psi_{r-1}, whose r-th derivative vanishes
        assert!(rep.rows[0].lhs < 1e-12);
        assert_eq!(rep.rows[0].ratio, 0.0);
        assert!(rep.summary.max_ratio.is_finite());
    }

    #[test]
    fn sharpness_rejects_zero_eps_and_small_m() {
        let base = LandauSharpnessConfig {
            p: Lp::Finite(2.0),
            q: Lp::Finite(4.0),
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            r: 1,
            k: 1,
            eps: 0.0,
            family: SharpnessFamilySpec { m: 4, n_grid: vec![8, 16, 32, 64] },
            fit_octaves: 2,
        };
        assert!(matches!(landau_sharpness_experiment(&base), Err(Error::Hypothesis { .. })));
        let small_m = LandauSharpnessConfig {
            eps: 0.25,
            family: SharpnessFamilySpec { m: 2, n_grid: vec![8, 16, 32, 64] },
            ..base.clone()
        };
        assert!(matches!(landau_sharpness_experiment(&small_m), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn hardy_littlewood_hypothesis_checker_names_conditions() {
        let mut cfg = HardyLittlewoodConfig {
            p: 2.0,
            q: 4.0,
            a: 0.0,
            b: 0.0,
            alpha: 0.0,
            beta: 0.0,
            sigma: None,
            family: SharpnessFamilySpec { m: 4, n_grid: vec![8, 16, 32, 64] },
            truncation: Some(256),
            explore_subcritical: false,
        };
        assert!(cfg.validate().is_ok());
        cfg.sigma = Some(0.1); // below the critical 0.5
        match cfg.validate() {
            Err(Error::Hypothesis { condition }) => {
                assert!(condition.contains("sigma >="), "{condition}")
            }
            other => panic!("expected hypothesis failure, got {other:?}"),
        }
    }

    #[test]
    fn ulyanov_k_rejects_infinite_q() {
        let cfg = UlyanovKConfig {
            p: 2.0,
            q: f64::INFINITY,
            r: 1.0,
            a: 0.0,
            b: 0.0,
            alpha: 0.0,
            beta: 0.0,
            f: FunctionConfig::Cosine { omega: 2.0 },
            t_grid: vec![0.125],
            u_min: default_u_min(),
            u_per_dyad: 4,
        };
        assert!(matches!(ulyanov_k_experiment(&cfg), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn ulyanov_moduli_polynomial_is_degenerate() {
        let cfg = UlyanovModuliConfig {
            p: Lp::Finite(2.0),
            q: Lp::Finite(4.0),
            r: 2,
            a: 0.0,
            b: 0.0,
            f: FunctionConfig::Polynomial { alpha: 0.0, beta: 0.0, coeffs: vec![0.5, 1.0] },
            t_grid: vec![0.05],
            u_min: 0.01,
            u_per_dyad: 4,
            h_grid: 4,
            x_resolution: 256,
        };
        let rep = ulyanov_moduli_experiment(&cfg).unwrap();
        assert!(rep.rows[0].degenerate || rep.rows[0].ratio < 1e-6);
    }

    #[test]
    fn nikolskii_constant_row_matches_beta_moments() {
        let cfg = NikolskiiConfig {
            p: Lp::Finite(2.0),
            q: Lp::Finite(4.0),
            a: 0.5,
            b: -0.3,
            n_grid: vec![0],
            random_draws: 0,
            seed: DEFAULT_SEED,
        };
        let rep = nikolskii_check(&cfg).unwrap();
        let m0 = crate::quad::jacobi_moments(WeightExponents::new(0.5, -0.3).unwrap(), 0)[0];
        // ||1||_q / ||1||_p = m0^{1/q - 1/p}
        let expected = m0.powf(0.25 - 0.5);
        assert_relative_eq!(rep.rows[0].ratio, expected, max_relative = 1e-9);
    }

    #[test]
    fn nikolskii_ratio_scale_invariant() {
        let weight = WeightExponents::legendre();
        let basis: JacobiIndex = weight.into();
        let poly = BasisPolynomial::new(basis, vec![0.3, -1.0, 0.7]).unwrap();
        let scaled = poly.scaled(5.0).unwrap();
        let r1 = lp_norm(&poly, Lp::Finite(4.0), weight, Interval::full(), 1).unwrap()
            / lp_norm(&poly, Lp::Finite(2.0), weight, Interval::full(), 1).unwrap();
        let r2 = lp_norm(&scaled, Lp::Finite(4.0), weight, Interval::full(), 1).unwrap()
            / lp_norm(&scaled, Lp::Finite(2.0), weight, Interval::full(), 1).unwrap();
        assert_relative_eq!(r1, r2, max_relative = 1e-12);
    }

    #[test]
    fn two_weight_integer_sigma_is_identity() {
        let cfg = TwoWeightMarkovConfig {
            r: 2,
            sigma: 1.0,
            p: Lp::Finite(2.0),
            a: 0.0,
            b: 0.0,
            n_grid: vec![4, 8, 16],
            random_draws: 2,
            seed: DEFAULT_SEED,
        };
        let rep = two_weight_markov_check(&cfg).unwrap();
        for row in &rep.rows {
            assert!(!row.degenerate);
            assert_eq!(row.ratio, 1.0, "n = {}", row.parameter);
        }
    }

    #[test]
    fn two_weight_low_degree_rows_degenerate() {
        let cfg = TwoWeightMarkovConfig {
            r: 3,
            sigma: 1.5,
            p: Lp::Finite(2.0),
            a: 0.0,
            b: 0.0,
            n_grid: vec![2],
            random_draws: 0,
            seed: DEFAULT_SEED,
        };
        // every candidate has degree < r + [sigma]: both sides vanish
        let rep = two_weight_markov_check(&cfg).unwrap();
        assert!(rep.rows[0].degenerate);
    }
}
