//! Closed-form test functions with exact evaluation, declared kink
//! abscissae, and exact derivatives where available.
//!
//! The families cover everything the experiments sweep over: the
//! edge-bump sequence `((x + 1/n - 1)_+)^m`, endpoint powers `(1-x)^g`,
//! cosines, and polynomials in any Jacobi basis.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jacobi::{derivative_shift, BasisPolynomial};
use crate::quad::Integrand;
use crate::weights::{JacobiIndex, WeightExponents};

#[derive(Clone)]
enum Family {
    /// `scale * ((x - edge)_+)^power`; the sharpness family has `edge = 1 - 1/n`.
    Bump { edge: f64, power: u32, scale: f64 },
    /// `scale * (1 - x)^gamma`.
    PowerOneMinusX { gamma: f64, scale: f64 },
    /// `scale * cos(pi * omega * x + phase)`.
    Cosine { omega: f64, phase: f64, scale: f64 },
    /// A polynomial in some Jacobi basis.
    Poly(BasisPolynomial),
    /// `f - p` for a polynomial `p` (residuals of approximants).
    Diff { f: Arc<FunctionSpec>, p: BasisPolynomial },
    /// `f * (1-x)^a (1+x)^b` (products for sup norms).
    WeightProduct { f: Arc<FunctionSpec>, w: WeightExponents },
    /// Arbitrary closure; no exact derivatives.
    Custom {
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        label: String,
    },
}

/// A test function: family tag + parameters, evaluation, kinks, and exact
/// derivatives up to the declared order.
#[derive(Clone)]
pub struct FunctionSpec {
    family: Family,
    kinks: Vec<f64>,
    /// Highest order for which `derivative` returns an exact closed form.
    max_exact_derivative: usize,
}

impl FunctionSpec {
    /// The sharpness family member `f_n(x) = ((x + 1/n - 1)_+)^m`,
    /// kinked at `1 - 1/n` and `C^{m-1}` there.
    pub fn bump(n: u32, m: u32) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid("bump family needs n >= 1 and m >= 1"));
        }
        let edge = 1.0 - 1.0 / n as f64;
        Ok(Self {
            family: Family::Bump { edge, power: m, scale: 1.0 },
            kinks: vec![edge],
            max_exact_derivative: (m - 1) as usize,
        })
    }

    /// `(1 - x)^gamma` for non-integer `gamma > 0` (kinked at 1 only in
    /// higher derivatives, which the quadrature treats via the endpoint
    /// cascade rather than a declared kink).
    pub fn power_one_minus_x(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::invalid("endpoint power needs gamma > 0"));
        }
        Ok(Self {
            family: Family::PowerOneMinusX { gamma, scale: 1.0 },
            kinks: Vec::new(),
            max_exact_derivative: gamma.floor() as usize,
        })
    }

    /// `cos(pi * omega * x)`.
    pub fn cosine(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega != 0.0) {
            return Err(Error::invalid("cosine frequency must be finite and nonzero"));
        }
        Ok(Self {
            family: Family::Cosine { omega, phase: 0.0, scale: 1.0 },
            kinks: Vec::new(),
            max_exact_derivative: usize::MAX,
        })
    }

    /// Wraps a polynomial.
    pub fn poly(p: BasisPolynomial) -> Self {
        Self { family: Family::Poly(p), kinks: Vec::new(), max_exact_derivative: usize::MAX }
    }

    /// The orthonormal basis polynomial `psi_k`.
    pub fn psi(basis: JacobiIndex, k: usize) -> Result<Self> {
        Ok(Self::poly(BasisPolynomial::unit(basis, k)?))
    }

    /// The residual `f - p`.
    pub fn minus_poly(f: &FunctionSpec, p: BasisPolynomial) -> Self {
        Self {
            kinks: f.kinks.clone(),
            max_exact_derivative: f.max_exact_derivative,
            family: Family::Diff { f: Arc::new(f.clone()), p },
        }
    }

    /// The pointwise product `f * (1-x)^a (1+x)^b`.
    pub fn times_weight(f: &FunctionSpec, w: WeightExponents) -> Self {
        Self {
            kinks: f.kinks.clone(),
            max_exact_derivative: 0,
            family: Family::WeightProduct { f: Arc::new(f.clone()), w },
        }
    }

    /// Closure-backed function with declared kinks; no exact derivatives.
    pub fn custom(
        label: impl Into<String>,
        kinks: Vec<f64>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            family: Family::Custom { eval: Arc::new(eval), label: label.into() },
            kinks,
            max_exact_derivative: 0,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.family = match &self.family {
            Family::Bump { edge, power, scale } => {
                Family::Bump { edge: *edge, power: *power, scale: c * scale }
            }
            Family::PowerOneMinusX { gamma, scale } => {
                Family::PowerOneMinusX { gamma: *gamma, scale: c * scale }
            }
            Family::Cosine { omega, phase, scale } => {
                Family::Cosine { omega: *omega, phase: *phase, scale: c * scale }
            }
            Family::Poly(p) => Family::Poly(p.scaled(c).expect("finite scale")),
            other => {
                let f = Arc::new(Self { family: other.clone(), ..self.clone() });
                return Self {
                    kinks: self.kinks.clone(),
                    max_exact_derivative: 0,
                    family: Family::Custom {
                        label: format!("{c} * {}", f.label()),
                        eval: Arc::new(move |x| c * f.eval_inner(x)),
                    },
                };
            }
        };
        out
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::Bump { edge, power, scale } => {
                format!("{scale} * ((x - {edge})_+)^{power}")
            }
            Family::PowerOneMinusX { gamma, scale } => format!("{scale} * (1-x)^{gamma}"),
            Family::Cosine { omega, phase, scale } => {
                format!("{scale} * cos(pi*{omega}*x + {phase})")
            }
            Family::Poly(p) => format!(
                "poly(deg {}, basis ({}, {}))",
                p.degree(),
                p.basis.alpha,
                p.basis.beta
            ),
            Family::Diff { f, p } => format!("{} - poly(deg {})", f.label(), p.degree()),
            Family::WeightProduct { f, w } => {
                format!("{} * w^({}, {})", f.label(), w.a, w.b)
            }
            Family::Custom { label, .. } => label.clone(),
        }
    }

    fn eval_inner(&self, x: f64) -> f64 {
        match &self.family {
            Family::Bump { edge, power, scale } => {
                let d = x - edge;
                if d <= 0.0 {
                    0.0
                } else {
                    scale * d.powi(*power as i32)
                }
            }
            Family::PowerOneMinusX { gamma, scale } => scale * (1.0 - x).max(0.0).powf(*gamma),
            Family::Cosine { omega, phase, scale } => {
                scale * (std::f64::consts::PI * omega * x + phase).cos()
            }
            Family::Poly(p) => p.eval(x),
            Family::Diff { f, p } => f.eval_inner(x) - p.eval(x),
            Family::WeightProduct { f, w } => f.eval_inner(x) * w.eval(x),
            Family::Custom { eval, .. } => eval(x),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_inner(x)
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// If the function is a polynomial, its degree.
    pub fn poly_degree(&self) -> Option<usize> {
        match &self.family {
            Family::Poly(p) => Some(p.degree()),
            Family::Diff { f, p } => f.poly_degree().map(|d| d.max(p.degree())),
            _ => None,
        }
    }

    pub fn as_poly(&self) -> Option<&BasisPolynomial> {
        match &self.family {
            Family::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn max_exact_derivative(&self) -> usize {
        self.max_exact_derivative
    }

    /// Exact `r`-th derivative, when the family provides one.
    pub fn derivative(&self, r: usize) -> Result<FunctionSpec> {
        if r == 0 {
            return Ok(self.clone());
        }
        match &self.family {
            Family::Bump { edge, power, scale } => {
                if r > self.max_exact_derivative {
                    return Err(Error::invalid(format!(
                        "bump of power {power} has exact derivatives only up to order {}",
                        self.max_exact_derivative
                    )));
                }
                let mut c = *scale;
                for j in 0..r {
                    c *= (*power as usize - j) as f64;
                }
                Ok(Self {
                    family: Family::Bump { edge: *edge, power: power - r as u32, scale: c },
                    kinks: vec![*edge],
                    max_exact_derivative: self.max_exact_derivative - r,
                })
            }
            Family::PowerOneMinusX { gamma, scale } => {
                // d/dx (1-x)^g = -g (1-x)^{g-1}
                let mut c = *scale;
                let mut g = *gamma;
                for _ in 0..r {
                    c *= -g;
                    g -= 1.0;
                }
                Ok(Self {
                    family: Family::PowerOneMinusX { gamma: g, scale: c },
                    kinks: Vec::new(),
                    max_exact_derivative: self.max_exact_derivative.saturating_sub(r),
                })
            }
            Family::Cosine { omega, phase, scale } => {
                let w = std::f64::consts::PI * omega;
                Ok(Self {
                    family: Family::Cosine {
                        omega: *omega,
                        phase: phase + r as f64 * std::f64::consts::FRAC_PI_2,
                        scale: scale * w.powi(r as i32),
                    },
                    kinks: Vec::new(),
                    max_exact_derivative: usize::MAX,
                })
            }
            Family::Poly(p) => Ok(Self::poly(derivative_shift(p, r))),
            Family::Diff { f, p } => {
                let df = f.derivative(r)?;
                Ok(Self::minus_poly(&df, derivative_shift(p, r)))
            }
            Family::WeightProduct { .. } | Family::Custom { .. } => Err(Error::invalid(
                "no exact derivative closure for product/custom functions",
            )),
        }
    }
}

impl std::fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FunctionSpec({})", self.label())
    }
}

impl Integrand for FunctionSpec {
    fn eval(&self, x: f64) -> f64 {
        FunctionSpec::eval(self, x)
    }

    fn kinks(&self) -> &[f64] {
        FunctionSpec::kinks(self)
    }

    fn degree_hint(&self) -> Option<usize> {
        self.poly_degree()
    }
}

/// Serializable description of a test function, as it appears in
/// experiment configurations.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionConfig {
    /// `((x + 1/n - 1)_+)^m`
    Bump { n: u32, m: u32 },
    /// `(1 - x)^gamma`
    PowerOneMinusX { gamma: f64 },
    /// `cos(pi * omega * x)`
    Cosine { omega: f64 },
    /// `psi_k^{(alpha,beta)}`
    Psi { k: usize, alpha: f64, beta: f64 },
    /// coefficients against `psi_k^{(alpha,beta)}`
    Polynomial { alpha: f64, beta: f64, coeffs: Vec<f64> },
}

impl FunctionConfig {
    pub fn build(&self) -> Result<FunctionSpec> {
        match self {
            FunctionConfig::Bump { n, m } => FunctionSpec::bump(*n, *m),
            FunctionConfig::PowerOneMinusX { gamma } => FunctionSpec::power_one_minus_x(*gamma),
            FunctionConfig::Cosine { omega } => FunctionSpec::cosine(*omega),
            FunctionConfig::Psi { k, alpha, beta } => {
                FunctionSpec::psi(JacobiIndex::new(*alpha, *beta)?, *k)
            }
            FunctionConfig::Polynomial { alpha, beta, coeffs } => Ok(FunctionSpec::poly(
                BasisPolynomial::new(JacobiIndex::new(*alpha, *beta)?, coeffs.clone())?,
            )),
        }
    }
}

/// Build-time validation: verifies by centered finite differences that the
/// first derivative jumps only at the declared kinks (used by the tests).
pub fn kinks_are_consistent(f: &FunctionSpec, probe: usize) -> bool {
    let h = 1e-7;
    for i in 0..probe {
        let x = -1.0 + 2.0 * (i as f64 + 0.5) / probe as f64;
        if f.kinks().iter().any(|&k| (x - k).abs() < 1e-3) {
            continue;
        }
        if x - h < -1.0 || x + h > 1.0 {
            continue;
        }
        let slope_left = (f.eval(x) - f.eval(x - h)) / h;
        let slope_right = (f.eval(x + h) - f.eval(x)) / h;
        let scale = slope_left.abs().max(slope_right.abs()).max(1.0);
        if (slope_right - slope_left).abs() > 1e-3 * scale {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bump_values_and_kink() {
        let f = FunctionSpec::bump(4, 3).unwrap();
        let edge = 0.75;
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(edge), 0.0);
        assert_relative_eq!(f.eval(1.0), 0.25f64.powi(3), max_relative = 1e-15);
        assert_eq!(f.kinks(), &[edge]);
        assert!(kinks_are_consistent(&f, 512));
    }

    #[test]
    fn bump_derivatives() {
        let f = FunctionSpec::bump(8, 4).unwrap();
        let d2 = f.derivative(2).unwrap();
        let x = 0.95;
        let e = 1.0 - 1.0 / 8.0;
        assert_relative_eq!(d2.eval(x), 12.0 * (x - e).powi(2), max_relative = 1e-13);
        assert!(f.derivative(4).is_err());
    }

    #[test]
    fn cosine_derivatives() {
        let f = FunctionSpec::cosine(2.0).unwrap();
        let d = f.derivative(1).unwrap();
        let d2 = f.derivative(2).unwrap();
        let w = 2.0 * std::f64::consts::PI;
        for &x in &[-0.3, 0.1, 0.9] {
            assert_relative_eq!(d.eval(x), -w * (w * x).sin(), max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(d2.eval(x), -w * w * (w * x).cos(), max_relative = 1e-12, epsilon = 1e-9);
        }
    }

    #[test]
    fn endpoint_power_derivative() {
        let f = FunctionSpec::power_one_minus_x(2.5).unwrap();
        let d = f.derivative(1).unwrap();
        for &x in &[-0.5, 0.0, 0.7] {
            assert_relative_eq!(d.eval(x), -2.5 * (1.0 - x).powf(1.5), max_relative = 1e-13);
        }
    }

    #[test]
    fn poly_round_trip_and_diff() {
        let b = JacobiIndex::legendre();
        let p = BasisPolynomial::new(b, vec![1.0, 0.5, -0.25]).unwrap();
        let f = FunctionSpec::poly(p.clone());
        let g = FunctionSpec::minus_poly(&f, p);
        for &x in &[-0.8, 0.0, 0.6] {
            assert_relative_eq!(g.eval(x), 0.0, epsilon = 1e-14);
        }
        assert_eq!(f.poly_degree(), Some(2));
    }

    #[test]
    fn scaling_is_pointwise() {
        let f = FunctionSpec::bump(4, 2).unwrap();
        let g = f.scaled(-3.0);
        for &x in &[0.8, 0.9, 1.0] {
            assert_relative_eq!(g.eval(x), -3.0 * f.eval(x), max_relative = 1e-15);
        }
    }
}
