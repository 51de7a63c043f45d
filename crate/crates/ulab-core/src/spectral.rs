//! Fourier-Jacobi analysis/synthesis and coefficient-multiplier operators:
//! fractional integral and derivative, partial sums, Cesaro means, and the
//! delayed (de la Vallee Poussin type) means used as near-best approximants.
//!
//! Fractional operators defer their `lambda_k^{±sigma}` multiplier into an
//! accumulated exponent, so the multiplier algebra (`I_sigma I_tau =
//! I_{sigma+tau}`, `D_sigma I_sigma = ` mean-zero identity) holds exactly
//! on materialized coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::FunctionSpec;
use crate::jacobi::{eigenvalue, BasisPolynomial, OrthonormalSweep, MAX_DEGREE};
use crate::quad::{composite_points, gauss_jacobi_rule, MAX_PANELS};
use crate::weights::{Interval, JacobiIndex, Lp};

/// Coefficient-stability tolerance for adaptive analysis of non-polynomial
/// functions.
const ANALYZE_TOL: f64 = 1e-10;

/// A finite Fourier-Jacobi coefficient sequence tagged with its basis.
///
/// Entry `k` of [`Self::materialized`] is `f_hat_k^{(alpha,beta)}`, possibly
/// after coefficient-multiplier operators; `spectral_order` and `kill_mean`
/// carry deferred fractional multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoeffs {
    pub basis: JacobiIndex,
    coeffs: Vec<f64>,
    spectral_order: f64,
    kill_mean: bool,
    pub truncation_tol: f64,
}

impl SpectralCoeffs {
    pub fn new(basis: JacobiIndex, coeffs: Vec<f64>, truncation_tol: f64) -> Result<Self> {
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::invalid(format!("length {} exceeds degree cap", coeffs.len())));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("spectral coefficients must be finite"));
        }
        Ok(Self { basis, coeffs, spectral_order: 0.0, kill_mean: false, truncation_tol })
    }

    /// The unit sequence `e_k`.
    pub fn unit(basis: JacobiIndex, k: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self::new(basis, coeffs, 0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient `k` with deferred multipliers applied.
    pub fn coeff(&self, k: usize) -> f64 {
        let Some(&c) = self.coeffs.get(k) else { return 0.0 };
        if k == 0 {
            if self.kill_mean {
                0.0
            } else {
                c
            }
        } else if self.spectral_order == 0.0 {
            c
        } else {
            c * eigenvalue(k, self.basis).powf(self.spectral_order)
        }
    }

    /// All coefficients with deferred multipliers applied.
    pub fn materialized(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|k| self.coeff(k)).collect()
    }

    /// Materializes into a polynomial (the truncated expansion itself).
    pub fn to_poly(&self) -> BasisPolynomial {
        BasisPolynomial::new(self.basis, self.materialized()).expect("materialized coefficients finite")
    }

    /// Highest index with a structurally nonzero materialized coefficient.
    pub fn degree(&self) -> usize {
        let m = self.materialized();
        m.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }
}

/// Fourier-Jacobi coefficients `0..=n` of `f` in the given basis, by
/// Gauss-Jacobi quadrature with kink-aware panel splitting.
///
/// Exact (to ~1e-12) when `f` is a polynomial of degree `<= n`; otherwise
/// the rule is refined until the coefficients stabilize.
pub fn analyze(f: &FunctionSpec, basis: JacobiIndex, n: usize) -> Result<SpectralCoeffs> {
    if n > MAX_DEGREE {
        return Err(Error::invalid(format!("analysis degree {n} exceeds cap {MAX_DEGREE}")));
    }
    let weight = basis.weight();
    let kinks: Vec<f64> = f.kinks().iter().copied().filter(|&k| -1.0 < k && k < 1.0).collect();

    let coeffs_from_points = |points: &[(f64, f64)]| -> Vec<f64> {
        let mut coeffs = vec![0.0; n + 1];
        for &(x, w) in points {
            let fw = w * f.eval(x);
            let mut sweep = OrthonormalSweep::new(basis);
            for c in coeffs.iter_mut() {
                *c += fw * sweep.next(x);
            }
        }
        coeffs
    };

    if kinks.is_empty() {
        if let Some(d) = f.poly_degree() {
            // rule of order m integrates psi_n * f exactly when 2m-1 >= n + d
            let order = (n + d) / 2 + 2;
            let rule = gauss_jacobi_rule(weight, order)?;
            let points: Vec<(f64, f64)> =
                rule.nodes.iter().copied().zip(rule.weights.iter().copied()).collect();
            return SpectralCoeffs::new(basis, coeffs_from_points(&points), 0.0);
        }
        let mut order = n + 32;
        let mut coeffs = {
            let rule = gauss_jacobi_rule(weight, order)?;
            let points: Vec<(f64, f64)> =
                rule.nodes.iter().copied().zip(rule.weights.iter().copied()).collect();
            coeffs_from_points(&points)
        };
        while order < (1 << 14) {
            order *= 2;
            let rule = gauss_jacobi_rule(weight, order)?;
            let points: Vec<(f64, f64)> =
                rule.nodes.iter().copied().zip(rule.weights.iter().copied()).collect();
            let next = coeffs_from_points(&points);
            let scale = 1.0 + next.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let diff = coeffs
                .iter()
                .zip(&next)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            coeffs = next;
            if diff <= ANALYZE_TOL * scale {
                break;
            }
        }
        trim_tail(&mut coeffs);
        return SpectralCoeffs::new(basis, coeffs, ANALYZE_TOL);
    }

    // kinked: composite mesh split at the kinks, refined until stable
    let mut base = 16usize;
    while base * 64 < 4 * (n + 1) && base < MAX_PANELS {
        base *= 2;
    }
    let mut coeffs = coeffs_from_points(&composite_points(weight, Interval::full(), &kinks, base)?);
    while base < MAX_PANELS {
        base *= 2;
        let next = coeffs_from_points(&composite_points(weight, Interval::full(), &kinks, base)?);
        let scale = 1.0 + next.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let diff = coeffs
            .iter()
            .zip(&next)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        coeffs = next;
        if diff <= ANALYZE_TOL * scale {
            break;
        }
    }
    trim_tail(&mut coeffs);
    SpectralCoeffs::new(basis, coeffs, ANALYZE_TOL)
}

/// Drops trailing coefficients below the analysis tolerance so converged
/// expansions do not carry a tail of pure quadrature noise.
fn trim_tail(coeffs: &mut Vec<f64>) {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let floor = ANALYZE_TOL * (1.0 + scale);
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= floor) {
        coeffs.pop();
    }
}

/// Pointwise sum of the (materialized) expansion.
pub fn synthesize(c: &SpectralCoeffs, x: f64) -> f64 {
    let mut sweep = OrthonormalSweep::new(c.basis);
    let mut acc = 0.0;
    for k in 0..c.len() {
        let psi = sweep.next(x);
        acc += c.coeff(k) * psi;
    }
    acc
}

/// Fractional integral `I_sigma`: coefficient 0 kept, coefficient `k >= 1`
/// multiplied by `lambda_k^{-sigma}`.
pub fn fractional_integral(c: &SpectralCoeffs, sigma: f64) -> Result<SpectralCoeffs> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("fractional order sigma = {sigma} must be > 0")));
    }
    let mut out = c.clone();
    out.spectral_order -= sigma;
    Ok(out)
}

/// Fractional derivative `D_sigma`: coefficient 0 dropped, coefficient
/// `k >= 1` multiplied by `lambda_k^{sigma}`.
pub fn fractional_derivative(c: &SpectralCoeffs, sigma: f64) -> Result<SpectralCoeffs> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("fractional order sigma = {sigma} must be > 0")));
    }
    let mut out = c.clone();
    out.spectral_order += sigma;
    out.kill_mean = true;
    Ok(out)
}

/// Partial sum `S_n`: coefficients above `n` zeroed.
pub fn partial_sum(c: &SpectralCoeffs, n: usize) -> SpectralCoeffs {
    let mut out = c.clone();
    out.coeffs.truncate(n + 1);
    out
}

/// Cesaro mean factor `prod_{j=1}^{ell} (1 - k/(n+j))` for `k <= n`.
pub fn cesaro_factor(k: usize, n: usize, ell: usize) -> f64 {
    let mut f = 1.0;
    for j in 1..=ell {
        f *= 1.0 - k as f64 / (n + j) as f64;
    }
    f
}

/// Cesaro operator `C_n^ell`: coefficient `k <= n` damped by
/// [`cesaro_factor`], coefficients above `n` zeroed.
pub fn cesaro_mean(c: &SpectralCoeffs, n: usize, ell: usize) -> Result<SpectralCoeffs> {
    if ell == 0 {
        return Err(Error::invalid("Cesaro order ell must be >= 1"));
    }
    let materialized = c.materialized();
    let coeffs: Vec<f64> = materialized
        .iter()
        .take(n + 1)
        .enumerate()
        .map(|(k, &v)| v * cesaro_factor(k, n, ell))
        .collect();
    SpectralCoeffs::new(c.basis, coeffs, c.truncation_tol)
}

/// Delayed-mean damping factor: 1 up to `n`, `((2n+1-k)/(n+1))^ell` on
/// `n < k <= 2n`, 0 beyond. For `ell = 1` this is the classical average
/// of the partial sums `S_n, ..., S_2n`.
pub fn vallee_poussin_factor(k: usize, n: usize, ell: usize) -> f64 {
    if k <= n {
        1.0
    } else if k <= 2 * n {
        ((2 * n + 1 - k) as f64 / (n + 1) as f64).powi(ell as i32)
    } else {
        0.0
    }
}

/// Delayed mean built from Cesaro-type tapers: reproduces coefficients
/// `k <= n` exactly, damps `n < k <= 2n`, zeroes `k > 2n`.
pub fn vallee_poussin(c: &SpectralCoeffs, n: usize, ell: usize) -> Result<SpectralCoeffs> {
    if n == 0 {
        return Err(Error::invalid("delayed mean needs n >= 1"));
    }
    if ell == 0 {
        return Err(Error::invalid("delayed mean taper needs ell >= 1"));
    }
    let materialized = c.materialized();
    let coeffs: Vec<f64> = materialized
        .iter()
        .take(2 * n + 1)
        .enumerate()
        .map(|(k, &v)| v * vallee_poussin_factor(k, n, ell))
        .collect();
    SpectralCoeffs::new(c.basis, coeffs, c.truncation_tol)
}

/// Exact projection of a pointwise-evaluable polynomial of known degree
/// onto a Jacobi basis (rule order chosen so the projection integrals are
/// exact).
pub fn project_poly(
    eval: &dyn Fn(f64) -> f64,
    degree: usize,
    basis: JacobiIndex,
) -> Result<BasisPolynomial> {
    let rule = gauss_jacobi_rule(basis.weight(), degree + 1)?;
    let mut coeffs = vec![0.0; degree + 1];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fw = w * eval(x);
        let mut sweep = OrthonormalSweep::new(basis);
        for c in coeffs.iter_mut() {
            *c += fw * sweep.next(x);
        }
    }
    BasisPolynomial::new(basis, coeffs)
}

/// Re-expands a polynomial in another Jacobi basis (exactly, by quadrature).
pub fn convert_basis(p: &BasisPolynomial, to: JacobiIndex) -> Result<BasisPolynomial> {
    if p.basis == to {
        return Ok(p.clone());
    }
    project_poly(&|x| p.eval(x), p.degree(), to)
}

/// Smallest integer `ell` for which the Cesaro operator `C_n^ell` is
/// bounded on `L_p(w^{(a,b)})` for expansions in basis `(alpha, beta)`,
/// per the threshold
/// `ell > max{|2(a+1)/p - alpha - 1|, |2(b+1)/p - beta - 1|,
/// |2(a+1)/p - alpha - 1/2 - 1/p|, |2(b+1)/p - beta - 1/2 - 1/p|,
/// |2(a-b)/p - (alpha - beta)|}`.
pub fn cesaro_min_ell(p: Lp, weight: crate::weights::WeightExponents, basis: JacobiIndex) -> usize {
    let ip = p.reciprocal();
    let (a, b) = (weight.a, weight.b);
    let (al, be) = (basis.alpha, basis.beta);
    let bound = [
        (2.0 * (a + 1.0) * ip - al - 1.0).abs(),
        (2.0 * (b + 1.0) * ip - be - 1.0).abs(),
        (2.0 * (a + 1.0) * ip - al - 0.5 - ip).abs(),
        (2.0 * (b + 1.0) * ip - be - 0.5 - ip).abs(),
        (2.0 * (a - b) * ip - (al - be)).abs(),
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    bound.floor() as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::weighted_lp_norm;
    use crate::weights::WeightExponents;
    use approx::assert_relative_eq;

    fn legendre() -> JacobiIndex {
        JacobiIndex::legendre()
    }

    #[test]
    fn analyze_unit_vector() {
        let b = JacobiIndex::new(0.5, -0.3).unwrap();
        let f = FunctionSpec::psi(b, 3).unwrap();
        let c = analyze(&f, b, 6).unwrap();
        let m = c.materialized();
        for (k, &v) in m.iter().enumerate() {
            let target = if k == 3 { 1.0 } else { 0.0 };
            assert!((v - target).abs() < 1e-12, "coeff {k} = {v}");
        }
    }

    #[test]
    fn analyze_constant() {
        let one = FunctionSpec::poly(
            BasisPolynomial::new(legendre(), vec![2.0f64.sqrt()]).unwrap(),
        );
        assert_relative_eq!(one.eval(0.3), 1.0, max_relative = 1e-15);
        let c = analyze(&one, legendre(), 4).unwrap();
        assert_relative_eq!(c.coeff(0), 2.0f64.sqrt(), max_relative = 1e-13);
        for k in 1..=4 {
            assert!(c.coeff(k).abs() < 1e-13);
        }
    }

    #[test]
    fn analyze_linearity() {
        let b = legendre();
        let p = BasisPolynomial::new(b, vec![0.4, -1.0, 0.3]).unwrap();
        let f = FunctionSpec::poly(p.clone());
        let g = FunctionSpec::poly(p.scaled(2.0).unwrap());
        let cf = analyze(&f, b, 5).unwrap();
        let cg = analyze(&g, b, 5).unwrap();
        for k in 0..=5 {
            assert_relative_eq!(cg.coeff(k), 2.0 * cf.coeff(k), max_relative = 1e-12, epsilon = 1e-13);
        }
    }

    #[test]
    fn synthesize_round_trip_smooth() {
        let b = JacobiIndex::new(1.3, 0.7).unwrap();
        let f = FunctionSpec::cosine(1.0).unwrap();
        let c = analyze(&f, b, 40).unwrap();
        for &x in &[-0.9, -0.2, 0.5, 0.99] {
            assert_relative_eq!(synthesize(&c, x), f.eval(x), epsilon = 1e-10);
        }
    }

    #[test]
    fn analyze_kinked_function() {
        let b = legendre();
        let f = FunctionSpec::bump(4, 3).unwrap();
        let c = analyze(&f, b, 48).unwrap();
        for &x in &[-0.5, 0.7, 0.8, 0.95] {
            assert_relative_eq!(synthesize(&c, x), f.eval(x), epsilon = 2e-6);
        }
    }

    #[test]
    fn fractional_multipliers() {
        let b = legendre();
        let e0 = SpectralCoeffs::unit(b, 0).unwrap();
        let i0 = fractional_integral(&e0, 1.5).unwrap();
        assert_eq!(i0.materialized(), vec![1.0]);

        let e3 = SpectralCoeffs::unit(b, 3).unwrap();
        let i3 = fractional_integral(&e3, 0.7).unwrap();
        assert_relative_eq!(i3.coeff(3), eigenvalue(3, b).powf(-0.7), max_relative = 1e-15);

        let tiny = fractional_integral(&e3, 1e-12).unwrap();
        assert_relative_eq!(tiny.coeff(3), 1.0, max_relative = 1e-9);

        // lambda_1^2 = 2 for the Legendre basis
        let e1 = SpectralCoeffs::unit(b, 1).unwrap();
        let d1 = fractional_derivative(&e1, 2.0).unwrap();
        assert_relative_eq!(d1.coeff(1), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn multiplier_algebra_is_exact() {
        let b = JacobiIndex::new(0.5, -0.3).unwrap();
        let c = SpectralCoeffs::new(b, vec![0.7, -1.2, 0.0, 3.4, 0.2], 0.0).unwrap();

        let round = fractional_derivative(&fractional_integral(&c, 0.8).unwrap(), 0.8).unwrap();
        let mut zeroed = c.materialized();
        zeroed[0] = 0.0;
        assert_eq!(round.materialized(), zeroed);

        let two_step =
            fractional_integral(&fractional_integral(&c, 0.3).unwrap(), 0.45).unwrap();
        let one_step = fractional_integral(&c, 0.75).unwrap();
        assert_eq!(two_step.materialized(), one_step.materialized());
    }

    #[test]
    fn integral_contracts_high_modes() {
        let b = legendre();
        let mut prev = f64::INFINITY;
        for k in 1..40usize {
            let m = eigenvalue(k, b).powf(-0.6);
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    fn partial_sum_behaviour() {
        let b = legendre();
        let c = SpectralCoeffs::new(b, vec![1.0, 2.0, 3.0, 4.0], 0.0).unwrap();
        assert_eq!(partial_sum(&c, 10).materialized(), c.materialized());
        assert_eq!(partial_sum(&c, 0).materialized(), vec![1.0]);
        let once = partial_sum(&c, 2);
        let twice = partial_sum(&once, 2);
        assert_eq!(once, twice);
    }

    #[test]
    fn cesaro_factors() {
        assert_eq!(cesaro_factor(0, 1, 1), 1.0);
        assert_eq!(cesaro_factor(1, 1, 1), 0.5);
        for n in [4usize, 64, 4096] {
            assert_eq!(cesaro_factor(0, n, 3), 1.0);
        }
        // fixed k, ell: factor increases toward 1 as n grows
        let mut prev = 0.0;
        for exp in 3..=12 {
            let n = 1usize << exp;
            let f = cesaro_factor(3, n, 2);
            assert!(f > prev);
            prev = f;
        }
        assert!(prev < 1.0 && prev > 0.99);
    }

    #[test]
    fn vallee_poussin_contract() {
        let b = legendre();
        let c = SpectralCoeffs::new(b, (0..=20).map(|k| 1.0 / (k + 1) as f64).collect(), 0.0).unwrap();
        let v = vallee_poussin(&c, 5, 1).unwrap();
        for k in 0..=5 {
            assert_eq!(v.coeff(k), c.coeff(k));
        }
        for k in 11..=20 {
            assert_eq!(v.coeff(k), 0.0);
        }
        for k in 0..=20 {
            for ell in 1..=3 {
                let f = vallee_poussin_factor(k, 5, ell);
                assert!((0.0..=1.0).contains(&f));
            }
        }
    }

    #[test]
    fn parseval_identity() {
        let b = JacobiIndex::new(1.3, 0.7).unwrap();
        let c = SpectralCoeffs::new(b, vec![0.3, -0.8, 0.0, 1.1, -0.2, 0.5], 0.0).unwrap();
        let p = c.to_poly();
        let norm = weighted_lp_norm(&p, 2.0, b.weight(), Interval::full(), 1).unwrap();
        let parseval: f64 = c.materialized().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_relative_eq!(norm, parseval, max_relative = 1e-11);
    }

    #[test]
    fn second_derivative_matches_differential_operator() {
        // -(1-x^2) psi'' + ((alpha+beta+2)x + (alpha-beta)) psi' = lambda_k^2 psi
        let b = JacobiIndex::new(0.5, -0.3).unwrap();
        for k in [1usize, 2, 5, 9] {
            let p = BasisPolynomial::unit(b, k).unwrap();
            let d1 = crate::jacobi::derivative_shift(&p, 1);
            let d2 = crate::jacobi::derivative_shift(&p, 2);
            let l2 = eigenvalue(k, b).powi(2);
            for &x in &[-0.7, -0.1, 0.4, 0.8] {
                let lhs = -(1.0 - x * x) * d2.eval(x)
                    + ((b.alpha + b.beta + 2.0) * x + (b.alpha - b.beta)) * d1.eval(x);
                assert_relative_eq!(lhs, l2 * p.eval(x), max_relative = 1e-9, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn min_ell_reference_value() {
        // p = 2, (a,b) = (alpha,beta) = (0,0): all terms 0 or 1/2 -> ell = 1
        let ell = cesaro_min_ell(Lp::Finite(2.0), WeightExponents::legendre(), legendre());
        assert_eq!(ell, 1);
    }
}
