//! Orthonormal Jacobi polynomials: evaluation by three-term recurrence,
//! operator eigenvalues, and the basis-shift identity for derivatives.
//!
//! The normalization is unit weighted L2 norm with positive leading
//! coefficient, under which `psi_k' = lambda_k psi_{k-1}` in the basis
//! raised by one in both indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::Integrand;
use crate::recurrence;
use crate::weights::JacobiIndex;

/// Largest polynomial degree the evaluators accept.
pub const MAX_DEGREE: usize = 4096;

/// `lambda_k = sqrt(k (k + alpha + beta + 1))`, the square root of the
/// k-th eigenvalue of the Jacobi differential operator. Exactly 0 at k = 0.
pub fn eigenvalue(k: usize, basis: JacobiIndex) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    (kf * (kf + basis.alpha + basis.beta + 1.0)).sqrt()
}

/// Value of the orthonormal polynomial `psi_k^{(alpha,beta)}(x)`.
pub fn eval_orthonormal(k: usize, basis: JacobiIndex, x: f64) -> f64 {
    let mut sweep = OrthonormalSweep::new(basis);
    let mut value = sweep.next(x);
    for _ in 0..k {
        value = sweep.next(x);
    }
    value
}

/// Forward recurrence sweep producing `psi_0(x), psi_1(x), ...` one call
/// at a time; lets analysis/synthesis evaluate a whole range of degrees in
/// a single pass per point.
pub struct OrthonormalSweep {
    weight: crate::weights::WeightExponents,
    k: usize,
    prev: f64,
    curr: f64,
    sqrt_beta_curr: f64,
}

impl OrthonormalSweep {
    pub fn new(basis: JacobiIndex) -> Self {
        let weight = basis.weight();
        Self {
            weight,
            k: 0,
            prev: 0.0,
            curr: 0.0,
            sqrt_beta_curr: recurrence::beta(weight, 0).sqrt(),
        }
    }

    /// Value of `psi_k(x)` for the next degree `k` (starting at 0).
    pub fn next(&mut self, x: f64) -> f64 {
        let value = if self.k == 0 {
            1.0 / self.sqrt_beta_curr
        } else {
            let a = recurrence::alpha(self.weight, self.k - 1);
            let sqrt_beta_next = recurrence::beta(self.weight, self.k).sqrt();
            let v = ((x - a) * self.curr - self.sqrt_beta_curr * self.prev) / sqrt_beta_next;
            self.sqrt_beta_curr = sqrt_beta_next;
            v
        };
        if self.k > 0 {
            self.prev = self.curr;
        }
        self.curr = value;
        self.k += 1;
        value
    }
}

/// A finite expansion `sum_k coeffs[k] psi_k^{(alpha,beta)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisPolynomial {
    pub basis: JacobiIndex,
    coeffs: Vec<f64>,
}

impl BasisPolynomial {
    /// Builds from raw coefficients, trimming trailing (structural) zeros.
    pub fn new(basis: JacobiIndex, mut coeffs: Vec<f64>) -> Result<Self> {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::invalid(format!(
                "degree {} exceeds cap {MAX_DEGREE}",
                coeffs.len() - 1
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zero(basis: JacobiIndex) -> Self {
        Self { basis, coeffs: Vec::new() }
    }

    /// The unit coefficient vector `e_k`, i.e. `psi_k` itself.
    pub fn unit(basis: JacobiIndex, k: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self::new(basis, coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last structurally nonzero coefficient; 0 for the zero
    /// polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.basis, self.coeffs.iter().map(|&v| c * v).collect())
    }

    /// Evaluation by a single recurrence sweep with running accumulation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut sweep = OrthonormalSweep::new(self.basis);
        let mut acc = 0.0;
        for &c in &self.coeffs {
            let psi = sweep.next(x);
            acc += c * psi;
        }
        acc
    }
}

impl Integrand for BasisPolynomial {
    fn eval(&self, x: f64) -> f64 {
        BasisPolynomial::eval(self, x)
    }

    fn degree_hint(&self) -> Option<usize> {
        Some(self.degree())
    }
}

/// First derivative in the shifted basis: if `p = sum c_k psi_k^{(α,β)}`,
/// then `p' = sum lambda_k c_k psi_{k-1}^{(α+1,β+1)}`.
fn derivative_once(p: &BasisPolynomial) -> BasisPolynomial {
    let raised = p.basis.raised(1);
    if p.coeffs.len() <= 1 {
        return BasisPolynomial::zero(raised);
    }
    let coeffs: Vec<f64> = (1..p.coeffs.len())
        .map(|k| eigenvalue(k, p.basis) * p.coeffs[k])
        .collect();
    BasisPolynomial::new(raised, coeffs).expect("finite shifted coefficients")
}

/// The r-th derivative expressed in basis `(alpha + r, beta + r)`.
///
/// Coefficient `k - r` of the output is the product
/// `lambda_k^{(α,β)} ... lambda_{k-r+1}^{(α+r-1,β+r-1)}` times coefficient
/// `k` of the input; implemented as `r` single shifts so that iterating
/// with step 1 agrees with step `r` exactly.
pub fn derivative_shift(p: &BasisPolynomial, r: usize) -> BasisPolynomial {
    let mut out = p.clone();
    for _ in 0..r {
        out = derivative_once(&out);
    }
    out
}

/// Evaluates `sum coeffs[k] psi_k(x)`; thin alias over [`BasisPolynomial::eval`]
/// for call sites that hold coefficients and a basis separately.
pub fn eval_poly(p: &BasisPolynomial, x: f64) -> f64 {
    p.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss_jacobi_rule, jacobi_moments};
    use crate::weights::WeightExponents;
    use approx::assert_relative_eq;

    fn basis(alpha: f64, beta: f64) -> JacobiIndex {
        JacobiIndex::new(alpha, beta).unwrap()
    }

    #[test]
    fn eigenvalue_frozen_values() {
        assert_eq!(eigenvalue(0, basis(1.3, 0.7)), 0.0);
        assert_relative_eq!(eigenvalue(1, basis(0.0, 0.0)), 2.0f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(eigenvalue(3, basis(-0.5, -0.5)), 3.0, max_relative = 1e-15);
    }

    #[test]
    fn eigenvalue_strictly_increasing() {
        for b in [basis(0.0, 0.0), basis(-0.5, -0.5), basis(1.3, 0.7), basis(0.5, -0.3)] {
            let mut prev = -1.0;
            for k in 0..200 {
                let l = eigenvalue(k, b);
                assert!(l > prev);
                prev = l;
            }
        }
    }

    #[test]
    fn constant_and_linear_values() {
        // psi_0 = 1/sqrt(mu_0); Legendre mu_0 = 2
        assert_relative_eq!(
            eval_orthonormal(0, basis(0.0, 0.0), 0.3),
            1.0 / 2.0f64.sqrt(),
            max_relative = 1e-15
        );
        // normalized Legendre at 1: sqrt(k + 1/2)
        assert_relative_eq!(
            eval_orthonormal(1, basis(0.0, 0.0), 1.0),
            1.5f64.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            eval_orthonormal(2, basis(0.0, 0.0), 1.0),
            2.5f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn orthonormal_against_quadrature() {
        for b in [basis(0.0, 0.0), basis(-0.5, -0.5), basis(1.3, 0.7), basis(0.5, -0.3)] {
            let rule = gauss_jacobi_rule(b.weight(), 16).unwrap();
            for j in 0..=12usize {
                for k in j..=12usize {
                    let g = rule.integrate(|x| eval_orthonormal(j, b, x) * eval_orthonormal(k, b, x));
                    let target = if j == k { 1.0 } else { 0.0 };
                    assert!(
                        (g - target).abs() < 1e-11,
                        "gram({j},{k}) = {g} for basis ({}, {})",
                        b.alpha,
                        b.beta
                    );
                }
            }
        }
    }

    #[test]
    fn positive_leading_coefficient() {
        // for large x the highest degree dominates; value at x = 1 must be
        // positive for every reference basis by the sign convention
        for b in [basis(0.0, 0.0), basis(-0.5, -0.5), basis(1.3, 0.7), basis(0.5, -0.3)] {
            for k in 0..20 {
                assert!(eval_orthonormal(k, b, 1.0) > 0.0);
            }
        }
    }

    #[test]
    fn derivative_shift_single_mode() {
        let b = basis(0.5, -0.3);
        for k in 1..10usize {
            let p = BasisPolynomial::unit(b, k).unwrap();
            let d = derivative_shift(&p, 1);
            assert_eq!(d.basis, b.raised(1));
            assert_eq!(d.degree(), k - 1);
            assert_relative_eq!(d.coeffs()[k - 1], eigenvalue(k, b), max_relative = 1e-15);
        }
        let c = BasisPolynomial::unit(b, 0).unwrap();
        assert!(derivative_shift(&c, 1).is_zero());
    }

    #[test]
    fn derivative_shift_matches_finite_differences() {
        let b = basis(0.0, 0.0);
        let p = BasisPolynomial::new(b, vec![0.3, -1.0, 0.0, 0.7, 0.2]).unwrap();
        let d2 = derivative_shift(&p, 2);
        let h = 1e-4;
        for &x in &[-0.6, -0.1, 0.2, 0.5] {
            let fd = (p.eval(x + h) - 2.0 * p.eval(x) + p.eval(x - h)) / (h * h);
            assert_relative_eq!(d2.eval(x), fd, max_relative = 1e-6, epsilon = 1e-6);
        }
    }

    #[test]
    fn derivative_shift_composition_is_exact() {
        let b = basis(1.3, 0.7);
        let p = BasisPolynomial::new(b, vec![1.0, -0.5, 2.0, 0.25, -1.5, 0.1]).unwrap();
        let step = derivative_shift(&derivative_shift(&derivative_shift(&p, 1), 1), 1);
        let joint = derivative_shift(&p, 3);
        assert_eq!(step.coeffs(), joint.coeffs());
        assert_eq!(step.basis, joint.basis);
    }

    #[test]
    fn eval_poly_unit_vector_and_linearity() {
        let b = basis(0.0, 0.0);
        let e3 = BasisPolynomial::unit(b, 3).unwrap();
        for &x in &[-0.9, 0.0, 0.4, 1.0] {
            assert_relative_eq!(e3.eval(x), eval_orthonormal(3, b, x), max_relative = 1e-13);
        }
        assert_eq!(BasisPolynomial::zero(b).eval(0.5), 0.0);

        let p = BasisPolynomial::new(b, vec![1.0, 2.0, -1.0]).unwrap();
        let q = BasisPolynomial::new(b, vec![0.5, 0.0, 3.0, 1.0]).unwrap();
        let sum = BasisPolynomial::new(b, vec![1.5, 2.0, 2.0, 1.0]).unwrap();
        for &x in &[-0.7, 0.1, 0.8] {
            assert_relative_eq!(p.eval(x) + q.eval(x), sum.eval(x), max_relative = 1e-13);
        }
    }

    #[test]
    fn mean_value_of_constant() {
        // expanding f = 1 in any basis: coeff_0 = sqrt(mu_0)
        let b = basis(0.5, -0.3);
        let mu0 = jacobi_moments(WeightExponents::new(0.5, -0.3).unwrap(), 0)[0];
        assert_relative_eq!(
            eval_orthonormal(0, b, 0.0) * mu0.sqrt(),
            1.0,
            max_relative = 1e-14
        );
    }
}
