//! The three smoothness quantifiers: the spectral K-functional for the
//! Jacobi differential operator, the phi-K-functional, and the
//! Ditzian-Totik weighted modulus, each with realization-based evaluation
//! and (for the spectral K) a direct candidate-infimum upper bound.

use rayon::prelude::*;

use crate::approximation::{local_best_error, near_best};
use crate::error::{Error, Result};
use crate::funcs::FunctionSpec;
use crate::jacobi::{derivative_shift, eigenvalue, BasisPolynomial, MAX_DEGREE};
use crate::quad::{lp_norm, sup_norm, weighted_lp_norm, FnIntegrand};
use crate::spectral::{analyze, convert_basis, SpectralCoeffs};
use crate::weights::{Interval, JacobiIndex, Lp, WeightExponents};

/// The Ditzian-Totik step weight `phi(x) = sqrt(1 - x^2)`.
pub struct PhiFunction;

impl PhiFunction {
    pub fn eval(x: f64) -> f64 {
        (1.0 - x * x).max(0.0).sqrt()
    }
}

pub fn phi(x: f64) -> f64 {
    PhiFunction::eval(x)
}

/// Parameter tuple of a smoothness evaluation: function, order, scale,
/// norm exponent, norm weight `(a, b)`, operator basis `(alpha, beta)`.
#[derive(Debug, Clone)]
pub struct SmoothnessQuery<'a> {
    pub f: &'a FunctionSpec,
    pub r: f64,
    pub t: f64,
    pub p: Lp,
    pub norm_weight: WeightExponents,
    pub operator_basis: JacobiIndex,
}

impl<'a> SmoothnessQuery<'a> {
    pub fn new(
        f: &'a FunctionSpec,
        r: f64,
        t: f64,
        p: Lp,
        norm_weight: WeightExponents,
        operator_basis: JacobiIndex,
    ) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("smoothness order r = {r} must be > 0")));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::invalid(format!("scale t = {t} must lie in (0, 1)")));
        }
        Ok(Self { f, r, t, p, norm_weight, operator_basis })
    }

    /// Integer order, required by the modulus and the phi-K-functional.
    fn integer_r(&self) -> Result<usize> {
        if self.r.fract() != 0.0 || self.r < 1.0 {
            return Err(Error::invalid(format!(
                "order r = {} must be a positive integer here",
                self.r
            )));
        }
        Ok(self.r as usize)
    }
}

/// Caches one expansion of `f` so that K-functional evaluations across a
/// whole `t`/`u` grid reuse the analysis.
pub struct KEvaluator {
    f: FunctionSpec,
    p: Lp,
    weight: WeightExponents,
    basis: JacobiIndex,
    expansion: SpectralCoeffs,
    /// Largest degree at which the delayed-mean taper is fully resolved.
    n_cap: usize,
    /// `||f||_{L_p(w)}`; residual norms are refined only down to a fixed
    /// fraction of this scale (they bottom out at evaluation noise).
    f_scale: f64,
}

impl KEvaluator {
    /// Analyzes `f` once, deep enough to serve approximants up to degree
    /// `n_max` (the expansion runs to `2 n_max`, capped by the degree cap).
    pub fn new(
        f: &FunctionSpec,
        p: Lp,
        weight: WeightExponents,
        basis: JacobiIndex,
        n_max: usize,
    ) -> Result<Self> {
        match p {
            Lp::Infinity => {
                return Err(Error::hypothesis(
                    "spectral K-functional realization requires 1 < p < inf",
                ))
            }
            Lp::Finite(q) if q <= 1.0 => {
                return Err(Error::hypothesis(
                    "spectral K-functional realization requires 1 < p < inf",
                ))
            }
            _ => {}
        }
        let depth = match f.poly_degree() {
            Some(d) => d.max(n_max.min(MAX_DEGREE)),
            None => (2 * n_max).min(MAX_DEGREE),
        };
        let expansion = analyze(f, weight.into(), depth)?;
        let f_scale = lp_norm(f, p, weight, Interval::full(), 1)?;
        Ok(Self { f: f.clone(), p, weight, basis, expansion, n_cap: (depth / 2).max(1), f_scale })
    }

    fn norm_floor(&self) -> f64 {
        1e-9 * (1.0 + self.f_scale)
    }

    fn is_p2(&self) -> bool {
        matches!(self.p, Lp::Finite(q) if q == 2.0)
    }

    fn same_basis(&self) -> bool {
        JacobiIndex::from(self.weight) == self.basis
    }

    /// The near-best approximant of degree parameter `n` drawn from the
    /// cached expansion: the projection at p = 2, the delayed mean else.
    pub fn approximant(&self, n: usize) -> Result<BasisPolynomial> {
        if self.is_p2() {
            return Ok(crate::spectral::partial_sum(&self.expansion, n).to_poly());
        }
        let ell = crate::spectral::cesaro_min_ell(self.p, self.weight, self.weight.into()).min(4);
        Ok(crate::spectral::vallee_poussin(&self.expansion, n.min(self.n_cap), ell)?.to_poly())
    }

    fn residual_norm(&self, approximant: &BasisPolynomial, n: usize) -> Result<f64> {
        if self.is_p2() {
            // Parseval tail of the cached expansion (exact for polynomial f,
            // else accurate to the analysis truncation)
            let tail: f64 =
                self.expansion.materialized().iter().skip(n + 1).map(|c| c * c).sum();
            return Ok(tail.max(0.0).sqrt());
        }
        let residual = FunctionSpec::minus_poly(&self.f, approximant.clone());
        crate::quad::lp_norm_with_floor(
            &residual,
            self.p,
            self.weight,
            Interval::full(),
            1,
            self.norm_floor(),
        )
    }

    fn fractional_derivative_norm(&self, poly: &BasisPolynomial, r: f64) -> Result<f64> {
        let in_op_basis = convert_basis(poly, self.basis)?;
        if self.is_p2() && self.same_basis() {
            let sum: f64 = in_op_basis
                .coeffs()
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| {
                    let lc = eigenvalue(k, self.basis).powf(r) * c;
                    lc * lc
                })
                .sum();
            return Ok(sum.sqrt());
        }
        let coeffs: Vec<f64> = in_op_basis
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, &c)| if k == 0 { 0.0 } else { c * eigenvalue(k, self.basis).powf(r) })
            .collect();
        let dpoly = BasisPolynomial::new(self.basis, coeffs)?;
        lp_norm(&dpoly, self.p, self.weight, Interval::full(), 1)
    }

    /// Realization `||f - P_{n,f}|| + n^{-r} ||D_r P_{n,f}||`, `n = floor(1/t)`.
    pub fn k_realized(&self, r: f64, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::invalid(format!("scale t = {t} out of (0, 1)")));
        }
        let n = (1.0 / t).floor() as usize;
        let n_used = n.min(if self.is_p2() { self.expansion.len() } else { self.n_cap });
        let p_poly = self.approximant(n_used)?;
        let term1 = self.residual_norm(&p_poly, n_used)?;
        let term2 = (n as f64).powf(-r) * self.fractional_derivative_norm(&p_poly, r)?;
        Ok(term1 + term2)
    }

    /// Direct-infimum upper bound: minimum of `||f - c g|| + t^r c ||D_r g||`
    /// over partial-sum and delayed-mean candidates `g` with a scalar line
    /// search per candidate (`budget` bounds the candidate-degree count).
    pub fn k_direct(&self, r: f64, t: f64, budget: usize) -> Result<f64> {
        let n = ((1.0 / t).floor() as usize).max(1);
        // the g = 0 candidate gives ||f||
        let mut best = self.f_scale;

        let top = self.expansion.len().saturating_sub(1);
        let mut degrees: Vec<usize> = Vec::new();
        let mut m = 1usize;
        while m <= 2 * n && degrees.len() + 2 < budget.max(3) {
            degrees.push(m.min(top));
            m *= 2;
        }
        degrees.push(n.min(top));
        if let Some(d) = self.f.poly_degree() {
            degrees.push(d.min(top));
        }
        degrees.sort_unstable();
        degrees.dedup();

        for &deg in &degrees {
            for g in [
                crate::spectral::partial_sum(&self.expansion, deg).to_poly(),
                self.approximant(deg.max(1))?,
            ] {
                if g.coeffs().iter().all(|&c| c == 0.0) {
                    continue;
                }
                let dnorm = self.fractional_derivative_norm(&g, r)?;
                let objective = |c: f64| -> Result<f64> {
                    let res = FunctionSpec::minus_poly(&self.f, g.scaled(c)?);
                    let n = crate::quad::lp_norm_with_floor(
                        &res,
                        self.p,
                        self.weight,
                        Interval::full(),
                        1,
                        self.norm_floor(),
                    )?;
                    Ok(n + t.powf(r) * c.abs() * dnorm)
                };
                // coarse samples (0 and 1 are the exact competitors for a
                // single-mode f), then golden-section refinement
                let mut c_best = 0.0;
                let mut v_best = f64::INFINITY;
                for i in 0..=8 {
                    let c = 2.0 * i as f64 / 8.0;
                    let v = objective(c)?;
                    if v < v_best {
                        v_best = v;
                        c_best = c;
                    }
                }
                let mut lo = (c_best - 0.25).max(0.0);
                let mut hi = c_best + 0.25;
                let gr = 0.5 * (5.0f64.sqrt() - 1.0);
                let mut x1 = hi - gr * (hi - lo);
                let mut x2 = lo + gr * (hi - lo);
                let mut f1 = objective(x1)?;
                let mut f2 = objective(x2)?;
                for _ in 0..24 {
                    if f1 < f2 {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - gr * (hi - lo);
                        f1 = objective(x1)?;
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + gr * (hi - lo);
                        f2 = objective(x2)?;
                    }
                }
                best = best.min(v_best).min(f1).min(f2);
            }
        }
        Ok(best)
    }
}

/// Spectral K-functional via the realization
/// `||f - P_{n,f}||_{L_p(w)} + n^{-r} ||D_r P_{n,f}||_{L_p(w)}`, `n = floor(1/t)`.
pub fn k_spectral_realized(q: &SmoothnessQuery) -> Result<f64> {
    let n_max = ((1.0 / q.t).floor() as usize).max(1);
    let ev = KEvaluator::new(q.f, q.p, q.norm_weight, q.operator_basis, n_max)?;
    ev.k_realized(q.r, q.t)
}

/// Direct candidate-infimum upper bound on the spectral K-functional.
pub fn k_spectral_direct(q: &SmoothnessQuery, budget: usize) -> Result<f64> {
    let n_max = ((1.0 / q.t).floor() as usize).max(1);
    let ev = KEvaluator::new(q.f, q.p, q.norm_weight, q.operator_basis, n_max)?;
    ev.k_direct(q.r, q.t, budget)
}

/// Preimages of the kink `s` under the step maps `x -> x + c phi(x)`
/// appearing in the symmetric difference (quadratic in `x` after squaring).
fn kink_preimages(s: f64, r: usize, h: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..=r {
        let c = (r as f64 - 2.0 * i as f64) * h / 2.0;
        if c == 0.0 {
            out.push(s);
            continue;
        }
        let disc = 1.0 + c * c - s * s;
        if disc < 0.0 {
            continue;
        }
        let root = disc.sqrt();
        for sign in [-1.0, 1.0] {
            let x = (s + sign * c * root) / (1.0 + c * c);
            if x.abs() <= 1.0 && (x + c * phi(x) - s).abs() < 1e-9 {
                out.push(x);
            }
        }
    }
    out
}

/// The symmetric difference `Delta^r_{h phi} f` as an evaluable function
/// with its kink preimages declared.
fn symmetric_difference(f: &FunctionSpec, r: usize, h: f64) -> FunctionSpec {
    let mut binom = Vec::with_capacity(r + 1);
    let mut c = 1.0f64;
    for i in 0..=r {
        binom.push(if i % 2 == 0 { c } else { -c });
        c = c * (r - i) as f64 / (i + 1) as f64;
    }
    let mut kinks: Vec<f64> =
        f.kinks().iter().flat_map(|&s| kink_preimages(s, r, h)).collect();
    kinks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    kinks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

    let inner = f.clone();
    let rr = r as f64;
    FunctionSpec::custom(
        format!("symdiff(r={r}, h={h:.3e}) of {}", inner.label()),
        kinks,
        move |x| {
            let step = h * phi(x);
            let mut acc = 0.0;
            for (i, &bc) in binom.iter().enumerate() {
                let arg = (x + (rr / 2.0 - i as f64) * step).clamp(-1.0, 1.0);
                acc += bc * inner.eval(arg);
            }
            acc
        },
    )
}

/// The Ditzian-Totik weighted modulus: the supremum over a geometric
/// `h`-grid of the weighted norm of `Delta^r_{h phi} f` over the inner
/// interval `[-1 + 4 r^2 t^2, 1 - 4 r^2 t^2]`, plus the two endpoint
/// best-approximation terms of degree `r - 1`.
pub fn dt_modulus(q: &SmoothnessQuery, h_grid: usize, x_resolution: usize) -> Result<f64> {
    let r = q.integer_r()?;
    let kappa = r as f64;
    let edge = 4.0 * kappa * kappa * q.t * q.t;
    if edge >= 1.0 {
        return Err(Error::invalid(format!(
            "t = {} too large: inner interval [-1+{edge}, 1-{edge}] is empty",
            q.t
        )));
    }
    let inner = Interval::new(-1.0 + edge, 1.0 - edge)?;
    let h_grid = h_grid.max(1);
    let f_scale = sup_norm(q.f, Interval::full(), 512)?;
    let floor = 1e-12 * (1.0 + f_scale);

    // geometric grid in (0, t], spanning six octaves below h = t
    let hs: Vec<f64> = (0..h_grid)
        .map(|j| {
            if h_grid == 1 {
                q.t
            } else {
                q.t * (1.0 / 64.0f64).powf(j as f64 / (h_grid - 1) as f64)
            }
        })
        .collect();

    let omega = hs
        .par_iter()
        .map(|&h| {
            let delta = symmetric_difference(q.f, r, h);
            match q.p {
                Lp::Finite(p) => crate::quad::weighted_lp_norm_with_floor(
                    &delta,
                    p,
                    q.norm_weight,
                    inner,
                    (x_resolution / 64).max(1),
                    floor,
                ),
                Lp::Infinity => sup_norm(&delta, inner, x_resolution.max(256)),
            }
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);

    let lo_edge =
        local_best_error(q.f, r - 1, q.p, q.norm_weight, Interval::new(-1.0, -1.0 + edge)?)?;
    let hi_edge =
        local_best_error(q.f, r - 1, q.p, q.norm_weight, Interval::new(1.0 - edge, 1.0)?)?;
    Ok(omega + lo_edge + hi_edge)
}

/// Realization of the phi-K-functional:
/// `||f - P_{n,f}|| + t^r ||phi^r P_{n,f}^{(r)}||`, the derivative taken by
/// the basis shift and the `phi^r` factor absorbed as the weight-exponent
/// shift `(a + pr/2, b + pr/2)`.
pub fn k_phi_realized(q: &SmoothnessQuery) -> Result<f64> {
    let r = q.integer_r()?;
    let n = ((1.0 / q.t).floor() as usize).max(1);
    let p_poly = near_best(q.f, n, q.p, q.norm_weight)?;
    let residual = FunctionSpec::minus_poly(q.f, p_poly.clone());
    let f_scale = sup_norm(q.f, Interval::full(), 512)?;
    let term1 = crate::quad::lp_norm_with_floor(
        &residual,
        q.p,
        q.norm_weight,
        Interval::full(),
        1,
        1e-11 * (1.0 + f_scale),
    )?;
    let term2 = q.t.powi(r as i32) * phi_derivative_norm(&p_poly, r, q.p, q.norm_weight)?;
    Ok(term1 + term2)
}

/// `|| phi^r g^{(r)} ||_{L_p(w^{(a,b)})}` for a polynomial `g`.
pub fn phi_derivative_norm(
    g: &BasisPolynomial,
    r: usize,
    p: Lp,
    weight: WeightExponents,
) -> Result<f64> {
    let deriv = derivative_shift(g, r);
    match p {
        Lp::Finite(p) => {
            let shifted = WeightExponents::new(
                weight.a + p * r as f64 / 2.0,
                weight.b + p * r as f64 / 2.0,
            )?;
            weighted_lp_norm(&deriv, p, shifted, Interval::full(), 1)
        }
        Lp::Infinity => {
            let half_r = r as f64 / 2.0;
            let phi_factor = WeightExponents::new(half_r, half_r)?;
            let wrapped = FnIntegrand::new(move |x| deriv.eval(x) * phi_factor.eval(x));
            sup_norm(&wrapped, Interval::full(), 4096)
        }
    }
}

/// Outcome of a ratio whose denominator may vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioOutcome {
    Ratio(f64),
    Degenerate,
}

impl RatioOutcome {
    fn of(num: f64, den: f64) -> Self {
        if den <= 1e-300 {
            RatioOutcome::Degenerate
        } else {
            RatioOutcome::Ratio(num / den)
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            RatioOutcome::Ratio(v) => Some(*v),
            RatioOutcome::Degenerate => None,
        }
    }
}

/// The two polynomial-inequality ratios relating the phi-derivative and
/// the spectral derivative:
/// `||phi^r Q^{(r)}|| / ||D_r Q||` and `||D_r (Q - S_{r-1}Q)|| / ||phi^r Q^{(r)}||`.
///
/// Requires `(a+1)/p - alpha < 1` and `(b+1)/p - beta < 1`; vanishing
/// denominators are reported as [`RatioOutcome::Degenerate`].
pub fn theorem41_check(
    q_poly: &BasisPolynomial,
    r: usize,
    p: Lp,
    weight: WeightExponents,
    basis: JacobiIndex,
) -> Result<(RatioOutcome, RatioOutcome)> {
    let ip = p.reciprocal();
    if !((weight.a + 1.0) * ip - basis.alpha < 1.0) {
        return Err(Error::hypothesis(format!(
            "(a+1)/p - alpha = {} must be < 1",
            (weight.a + 1.0) * ip - basis.alpha
        )));
    }
    if !((weight.b + 1.0) * ip - basis.beta < 1.0) {
        return Err(Error::hypothesis(format!(
            "(b+1)/p - beta = {} must be < 1",
            (weight.b + 1.0) * ip - basis.beta
        )));
    }
    if r == 0 {
        return Err(Error::invalid("derivative order r must be >= 1"));
    }

    let phi_norm = phi_derivative_norm(q_poly, r, p, weight)?;

    let in_basis = convert_basis(q_poly, basis)?;
    let spectral = |min_k: usize| -> Result<f64> {
        let coeffs: Vec<f64> = in_basis
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                if k == 0 || k < min_k {
                    0.0
                } else {
                    c * eigenvalue(k, basis).powi(r as i32)
                }
            })
            .collect();
        let poly = BasisPolynomial::new(basis, coeffs)?;
        lp_norm(&poly, p, weight, Interval::full(), 1)
    };
    let spectral_full = spectral(0)?;
    let spectral_tail = spectral(r)?;

    Ok((RatioOutcome::of(phi_norm, spectral_full), RatioOutcome::of(spectral_tail, phi_norm)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn legendre_w() -> WeightExponents {
        WeightExponents::legendre()
    }

    fn legendre_b() -> JacobiIndex {
        JacobiIndex::legendre()
    }

    #[test]
    fn realized_on_polynomial_reduces_to_derivative_term() {
        // n > deg f: P_{n,f} = f and the K-functional is n^{-r} ||D_r f||
        let b = legendre_b();
        let f = FunctionSpec::poly(BasisPolynomial::new(b, vec![0.0, 1.0, 0.5, -0.3]).unwrap());
        let q = SmoothnessQuery::new(&f, 1.5, 0.1, Lp::Finite(2.0), legendre_w(), b).unwrap();
        let got = k_spectral_realized(&q).unwrap();
        let expected: f64 = [0.0, 1.0, 0.5, -0.3]
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let lc = eigenvalue(k, b).powf(1.5) * c;
                lc * lc
            })
            .sum::<f64>()
            .sqrt()
            * 10.0f64.powf(-1.5);
        assert_relative_eq!(got, expected, max_relative = 1e-9);
    }

    #[test]
    fn realized_single_mode() {
        let b = legendre_b();
        for k in [2usize, 7] {
            let f = FunctionSpec::psi(b, k).unwrap();
            let q =
                SmoothnessQuery::new(&f, 1.0, 1.0 / 16.0, Lp::Finite(2.0), legendre_w(), b).unwrap();
            let got = k_spectral_realized(&q).unwrap();
            assert_relative_eq!(got, eigenvalue(k, b) / 16.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn direct_matches_two_regime_formula() {
        let b = legendre_b();
        for k in [1usize, 4, 12] {
            for t in [0.5, 1.0 / 8.0, 1.0 / 64.0] {
                let f = FunctionSpec::psi(b, k).unwrap();
                let q = SmoothnessQuery::new(&f, 1.0, t, Lp::Finite(2.0), legendre_w(), b).unwrap();
                let got = k_spectral_direct(&q, 8).unwrap();
                let expected = (t * eigenvalue(k, b)).min(1.0);
                assert_relative_eq!(got, expected, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn direct_below_norm_and_realized() {
        let f = FunctionSpec::bump(8, 4).unwrap();
        let q =
            SmoothnessQuery::new(&f, 2.0, 0.1, Lp::Finite(2.0), legendre_w(), legendre_b()).unwrap();
        let direct = k_spectral_direct(&q, 8).unwrap();
        let realized = k_spectral_realized(&q).unwrap();
        let norm = weighted_lp_norm(&f, 2.0, legendre_w(), Interval::full(), 1).unwrap();
        assert!(direct <= norm + 1e-12);
        assert!(direct <= realized + 1e-12);
    }

    #[test]
    fn modulus_annihilates_low_degree() {
        let b = legendre_b();
        let f = FunctionSpec::poly(BasisPolynomial::new(b, vec![0.7, -0.4]).unwrap());
        let q = SmoothnessQuery::new(&f, 2.0, 0.05, Lp::Finite(4.0), legendre_w(), b).unwrap();
        let w = dt_modulus(&q, 8, 512).unwrap();
        assert!(w <= 1e-10, "modulus of linear polynomial: {w}");
    }

    #[test]
    fn modulus_of_identity_function_scales_like_t() {
        let b = legendre_b();
        let lin = crate::spectral::project_poly(&|x| x, 1, b).unwrap();
        let f = FunctionSpec::poly(lin);
        for t in [0.05f64, 0.02] {
            let q = SmoothnessQuery::new(&f, 1.0, t, Lp::Infinity, legendre_w(), b).unwrap();
            let w = dt_modulus(&q, 8, 2048).unwrap();
            // Delta_{h phi} x = h phi(x); the sup over the inner interval is
            // h (attained near 0), plus two midrange edge terms of 2 t^2
            assert!((w - t).abs() <= 5.0 * t * t, "t = {t}: {w}");
        }
    }

    #[test]
    fn modulus_monotone_in_t() {
        let f = FunctionSpec::cosine(2.0).unwrap();
        let b = legendre_b();
        let mut prev = 0.0;
        for &t in &[0.01, 0.02, 0.04, 0.08] {
            let q = SmoothnessQuery::new(&f, 2.0, t, Lp::Finite(2.0), legendre_w(), b).unwrap();
            let w = dt_modulus(&q, 8, 512).unwrap();
            assert!(w + 1e-12 >= prev, "t = {t}");
            prev = w;
        }
    }

    #[test]
    fn modulus_rejects_oversized_t() {
        let f = FunctionSpec::cosine(1.0).unwrap();
        let q =
            SmoothnessQuery::new(&f, 3.0, 0.4, Lp::Finite(2.0), legendre_w(), legendre_b()).unwrap();
        assert!(dt_modulus(&q, 4, 256).is_err());
    }

    #[test]
    fn k_phi_on_polynomial_is_exact() {
        let b = legendre_b();
        let f = FunctionSpec::poly(BasisPolynomial::new(b, vec![0.0, 0.0, 1.0]).unwrap());
        let t = 1.0 / 10.0;
        let q = SmoothnessQuery::new(&f, 1.0, t, Lp::Finite(2.0), legendre_w(), b).unwrap();
        let got = k_phi_realized(&q).unwrap();
        let p = BasisPolynomial::unit(b, 2).unwrap();
        let expected = t * phi_derivative_norm(&p, 1, Lp::Finite(2.0), legendre_w()).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-9);
    }

    #[test]
    fn k_phi_of_constant_vanishes() {
        let b = legendre_b();
        let f = FunctionSpec::poly(BasisPolynomial::new(b, vec![1.3]).unwrap());
        let q = SmoothnessQuery::new(&f, 1.0, 0.07, Lp::Finite(2.0), legendre_w(), b).unwrap();
        assert!(k_phi_realized(&q).unwrap() <= 1e-10);
    }

    #[test]
    fn theorem41_degenerate_and_single_mode() {
        let b = legendre_b();
        let w = legendre_w();
        let r = 3usize;
        // Q of degree r-1: Q^{(r)} = 0 and S_{r-1} Q = Q
        let q_low = BasisPolynomial::new(b, vec![0.5, 1.0, -2.0]).unwrap();
        let (first, second) = theorem41_check(&q_low, r, Lp::Finite(2.0), w, b).unwrap();
        assert_eq!(first.value(), Some(0.0));
        assert_eq!(second, RatioOutcome::Degenerate);

        let q_r = BasisPolynomial::unit(b, r).unwrap();
        let (first, second) = theorem41_check(&q_r, r, Lp::Finite(2.0), w, b).unwrap();
        let v1 = first.value().unwrap();
        assert!(v1.is_finite() && v1 > 0.0);
        // for a single mode psi_r the two ratios are reciprocal
        let v2 = second.value().unwrap();
        assert_relative_eq!(v1 * v2, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn theorem41_hypothesis_violation_is_config_error() {
        let b = JacobiIndex::new(-0.9, 0.0).unwrap();
        let q = BasisPolynomial::unit(b, 3).unwrap();
        let err =
            theorem41_check(&q, 2, Lp::Finite(1.0), WeightExponents::new(1.5, 0.0).unwrap(), b);
        assert!(matches!(err, Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn kink_preimage_solutions_are_valid() {
        for (s, r, h) in [(0.9, 2usize, 0.05), (0.5, 3, 0.02), (-0.7, 1, 0.1)] {
            let pre = kink_preimages(s, r, h);
            assert!(!pre.is_empty());
            for x in pre {
                let mut matched = false;
                for i in 0..=r {
                    let c = (r as f64 - 2.0 * i as f64) * h / 2.0;
                    if (x + c * phi(x) - s).abs() < 1e-8 {
                        matched = true;
                    }
                }
                assert!(matched, "preimage {x} solves no step equation");
            }
        }
    }
}
