//! Best and near-best weighted Lp polynomial approximation: `E_n(f)`, the
//! delayed-mean approximant `P_{n,f}`, and local best approximation on
//! edge intervals for the modulus definition.
//!
//! The Lp solver is iteratively reweighted least squares on a fixed
//! Chebyshev-clustered grid; the sup solver is a discrete exchange
//! iteration. Both report an upper bound on `E_n` (the continuum norm of
//! the residual at the returned polynomial).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::funcs::FunctionSpec;
use crate::jacobi::{BasisPolynomial, OrthonormalSweep};
use crate::quad::{sup_norm, weighted_lp_norm, FnIntegrand};
use crate::spectral::{analyze, cesaro_min_ell, partial_sum, project_poly, vallee_poussin};
use crate::weights::{Interval, JacobiIndex, Lp, WeightExponents};

/// Assertable bound on (near-best error) / (best error) over the suite.
pub const NEAR_BEST_FACTOR: f64 = 20.0;

/// Grid points per degree of freedom for the discrete solvers.
const GRID_PER_DOF: usize = 30;
/// IRLS iteration cap.
const IRLS_MAX_ITER: usize = 200;
/// Residual clamp inside the IRLS weight update.
const IRLS_CLAMP: f64 = 1e-12;
/// Exchange iteration cap.
const EXCHANGE_MAX_ITER: usize = 80;
/// Surrogate exponent serving p = 1 requests.
const P1_SURROGATE: f64 = 1.01;

/// Outcome of a best-approximation solve.
#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub approximant: BasisPolynomial,
    /// Achieved norm `||(f - P) w^{1/p}||` (an upper bound on `E_n`).
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
    /// True when a p = 1 request was served by the p = 1.01 surrogate.
    pub surrogate: bool,
}

/// Orthogonal projection onto degree `n` in `L_2(w^{(a,b)})`; the exact
/// minimizer, with the error read off the Parseval tail of the computed
/// expansion.
pub fn best_approx_l2(f: &FunctionSpec, n: usize, weight: WeightExponents) -> Result<ApproxResult> {
    best_approx_l2_with_tail(f, n, weight, tail_degree(f, n))
}

/// As [`best_approx_l2`] with an explicit analysis degree for the tail.
pub fn best_approx_l2_with_tail(
    f: &FunctionSpec,
    n: usize,
    weight: WeightExponents,
    tail: usize,
) -> Result<ApproxResult> {
    let basis: JacobiIndex = weight.into();
    let tail = tail.max(n);
    let coeffs = analyze(f, basis, tail)?;
    let approximant = partial_sum(&coeffs, n).to_poly();
    let error2: f64 = coeffs.materialized().iter().skip(n + 1).map(|c| c * c).sum();
    Ok(ApproxResult {
        approximant,
        error: error2.max(0.0).sqrt(),
        iterations: 1,
        converged: true,
        surrogate: false,
    })
}

fn tail_degree(f: &FunctionSpec, n: usize) -> usize {
    let t = (4 * n).max(n + 64);
    match f.poly_degree() {
        Some(d) => t.min(d.max(n)),
        None => t.min(crate::jacobi::MAX_DEGREE),
    }
}

/// Chebyshev-clustered grid (midpoint angles, so all nodes are interior)
/// with the integrand's kinks merged in; weights discretize `dx`.
fn clustered_grid(interval: Interval, m: usize, kinks: &[f64]) -> Vec<(f64, f64)> {
    let mid = 0.5 * (interval.hi + interval.lo);
    let half = 0.5 * (interval.hi - interval.lo);
    let m = m | 1; // odd count puts a node at the interval midpoint
    let mut pts: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let theta = std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
            // dx = sin(theta) dtheta under x = cos(theta)
            (mid + half * theta.cos(), half * theta.sin() * std::f64::consts::PI / m as f64)
        })
        .collect();
    pts.push((interval.lo, 0.0));
    pts.push((interval.hi, 0.0));
    for &k in kinks {
        if k > interval.lo && k < interval.hi {
            pts.push((k, 0.0));
        }
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pts
}

/// Fills `out` with `psi_0(x) ... psi_deg(x)`.
fn basis_row(basis: JacobiIndex, deg: usize, x: f64, out: &mut [f64]) {
    let mut sweep = OrthonormalSweep::new(basis);
    for slot in out.iter_mut().take(deg + 1) {
        *slot = sweep.next(x);
    }
}

/// Weighted least-squares solve `min sum_i u_i (f_i - P(x_i))^2` in the
/// given basis; returns the coefficient vector.
fn weighted_ls(
    basis: JacobiIndex,
    deg: usize,
    pts: &[(f64, f64)],
    values: &[f64],
    u: &[f64],
) -> Result<Vec<f64>> {
    let dim = deg + 1;
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    let mut row = vec![0.0; dim];
    for (i, &(x, _)) in pts.iter().enumerate() {
        if u[i] == 0.0 {
            continue;
        }
        basis_row(basis, deg, x, &mut row);
        for j in 0..dim {
            let uj = u[i] * row[j];
            rhs[j] += uj * values[i];
            for k in j..dim {
                g[(j, k)] += uj * row[k];
            }
        }
    }
    for j in 0..dim {
        for k in 0..j {
            g[(j, k)] = g[(k, j)];
        }
    }
    match g.clone().cholesky() {
        Some(ch) => Ok(ch.solve(&rhs).iter().copied().collect()),
        None => g
            .lu()
            .solve(&rhs)
            .map(|v| v.iter().copied().collect())
            .ok_or_else(|| Error::numerical("least-squares system is singular")),
    }
}

struct IrlsOutcome {
    coeffs: Vec<f64>,
    discrete_error: f64,
    iterations: usize,
    converged: bool,
}

/// IRLS for `min_P (sum_i W_i |f_i - P(x_i)|^p)^{1/p}` with weights
/// `|r|^{p-2}` clamped below, damped for p > 2, tracking the best iterate.
fn irls(
    basis: JacobiIndex,
    deg: usize,
    pts: &[(f64, f64)],
    values: &[f64],
    p: f64,
    tol: f64,
    max_iter: usize,
) -> Result<IrlsOutcome> {
    let discrete_norm = |coeffs: &[f64]| -> f64 {
        let poly = BasisPolynomial::new(basis, coeffs.to_vec()).expect("finite coeffs");
        pts.iter()
            .zip(values)
            .map(|(&(x, w), &fv)| w * (fv - poly.eval(x)).abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    };

    // L2 start
    let u0: Vec<f64> = pts.iter().map(|&(_, w)| w).collect();
    let mut coeffs = weighted_ls(basis, deg, pts, values, &u0)?;
    let mut err = discrete_norm(&coeffs);
    let mut best = (coeffs.clone(), err);
    let relax = if p > 2.0 { 1.0 / (p - 1.0) } else { 1.0 };

    let mut iterations = 1;
    let mut converged = (p - 2.0).abs() < 1e-14;
    while !converged && iterations < max_iter {
        let poly = BasisPolynomial::new(basis, coeffs.clone()).expect("finite coeffs");
        let u: Vec<f64> = pts
            .iter()
            .zip(values)
            .map(|(&(x, w), &fv)| {
                let r = (fv - poly.eval(x)).abs().max(IRLS_CLAMP);
                w * r.powf(p - 2.0)
            })
            .collect();
        let solved = weighted_ls(basis, deg, pts, values, &u)?;
        for (c, s) in coeffs.iter_mut().zip(&solved) {
            *c = (1.0 - relax) * *c + relax * s;
        }
        let next = discrete_norm(&coeffs);
        iterations += 1;
        if next < best.1 {
            best = (coeffs.clone(), next);
        }
        if (next - err).abs() <= tol * next.max(1e-300) {
            converged = true;
        }
        err = next;
    }
    Ok(IrlsOutcome { coeffs: best.0, discrete_error: best.1, iterations, converged })
}

/// Best Lp approximation by IRLS on a fixed quadrature grid (`1 < p < inf`;
/// `p = 1` is served by the 1.01 surrogate and flagged).
pub fn best_approx_lp(
    f: &FunctionSpec,
    n: usize,
    p: f64,
    weight: WeightExponents,
    tol: f64,
) -> Result<ApproxResult> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p = {p} out of range for the Lp solver")));
    }
    let (p_eff, surrogate) = if p == 1.0 { (P1_SURROGATE, true) } else { (p, false) };

    let basis: JacobiIndex = weight.into();
    let m = GRID_PER_DOF * (n + 1);
    let mut pts = clustered_grid(Interval::full(), m, f.kinks());
    // fold the norm weight into the discrete measure (zero-measure points
    // such as kinks and endpoints stay zero even for singular weights)
    for (x, w) in pts.iter_mut() {
        if *w != 0.0 {
            *w *= weight.eval(*x);
        }
    }
    let values: Vec<f64> = pts.iter().map(|&(x, _)| f.eval(x)).collect();
    let out = irls(basis, n, &pts, &values, p_eff, tol, IRLS_MAX_ITER)?;

    let approximant = BasisPolynomial::new(basis, out.coeffs)?;
    let residual = FunctionSpec::minus_poly(f, approximant.clone());
    let error = weighted_lp_norm(&residual, p_eff, weight, Interval::full(), 1)?;
    Ok(ApproxResult {
        approximant,
        error,
        iterations: out.iterations,
        converged: out.converged,
        surrogate,
    })
}

struct ExchangeOutcome {
    coeffs: Vec<f64>,
    error: f64,
    iterations: usize,
    converged: bool,
}

/// Discrete Chebyshev (minimax) approximation on a grid via single-point
/// exchange, in the local orthonormal Legendre basis of the interval.
fn exchange_on_grid(xs: &[f64], values: &[f64], deg: usize, tol: f64) -> Result<ExchangeOutcome> {
    let m = xs.len();
    let dim = deg + 2;
    if m < dim {
        return Err(Error::invalid("grid too small for exchange"));
    }
    let basis = JacobiIndex::legendre();
    let lo = xs[0];
    let hi = xs[m - 1];
    let to_local = |x: f64| ((2.0 * x - lo - hi) / (hi - lo)).clamp(-1.0, 1.0);

    let mut refs: Vec<usize> = (0..dim).map(|j| j * (m - 1) / (dim - 1)).collect();
    let mut best: Option<ExchangeOutcome> = None;
    let mut iterations = 0;

    loop {
        iterations += 1;
        // solve P(x_j) + (-1)^j E = f(x_j) on the reference set
        let mut a = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = DVector::<f64>::zeros(dim);
        let mut row = vec![0.0; deg + 1];
        for (j, &r) in refs.iter().enumerate() {
            basis_row(basis, deg, to_local(xs[r]), &mut row);
            for k in 0..=deg {
                a[(j, k)] = row[k];
            }
            a[(j, deg + 1)] = if j % 2 == 0 { 1.0 } else { -1.0 };
            rhs[j] = values[r];
        }
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::numerical("exchange reference system singular"))?;
        let coeffs: Vec<f64> = sol.iter().take(deg + 1).copied().collect();
        let leveled = sol[deg + 1].abs();

        let poly = BasisPolynomial::new(basis, coeffs.clone())?;
        let mut worst = 0usize;
        let mut worst_abs = 0.0;
        let residual: Vec<f64> = (0..m)
            .map(|i| {
                let r = values[i] - poly.eval(to_local(xs[i]));
                if r.abs() > worst_abs {
                    worst_abs = r.abs();
                    worst = i;
                }
                r
            })
            .collect();

        let outcome = ExchangeOutcome { coeffs, error: worst_abs, iterations, converged: true };
        if best.as_ref().is_none_or(|b| outcome.error < b.error) {
            best = Some(outcome);
        }
        if worst_abs <= (1.0 + tol) * leveled.max(1e-300) || iterations >= EXCHANGE_MAX_ITER {
            let mut out = best.expect("at least one iterate");
            out.converged = worst_abs <= (1.0 + tol) * leveled.max(1e-300);
            out.iterations = iterations;
            return Ok(out);
        }

        // single-point exchange keeping the alternation pattern
        let sign = residual[worst].signum();
        if worst < refs[0] {
            if residual[refs[0]].signum() == sign {
                refs[0] = worst;
            } else {
                refs.pop();
                refs.insert(0, worst);
            }
        } else if worst > *refs.last().unwrap() {
            let last = *refs.last().unwrap();
            if residual[last].signum() == sign {
                *refs.last_mut().unwrap() = worst;
            } else {
                refs.remove(0);
                refs.push(worst);
            }
        } else {
            for j in 0..dim - 1 {
                if refs.contains(&worst) {
                    break;
                }
                if refs[j] < worst && worst < refs[j + 1] {
                    if residual[refs[j]].signum() == sign {
                        refs[j] = worst;
                    } else {
                        refs[j + 1] = worst;
                    }
                    break;
                }
            }
        }
    }
}

/// Discrete minimax approximation of `f` on the interval (unweighted sup),
/// with the result expressed in the global Legendre basis.
pub fn best_approx_sup(
    f: &FunctionSpec,
    n: usize,
    interval: Interval,
    tol: f64,
) -> Result<ApproxResult> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let m = (GRID_PER_DOF * (n + 1)).max(64);
    let pts = clustered_grid(interval, m, f.kinks());
    let xs: Vec<f64> = pts.iter().map(|&(x, _)| x).collect();
    let values: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
    let out = exchange_on_grid(&xs, &values, n, tol)?;

    let basis = JacobiIndex::legendre();
    let local = BasisPolynomial::new(basis, out.coeffs)?;
    let (lo, hi) = (interval.lo, interval.hi);
    let approximant =
        project_poly(&|x| local.eval((2.0 * x - lo - hi) / (hi - lo)), n, basis)?;
    Ok(ApproxResult {
        approximant,
        error: out.error,
        iterations: out.iterations,
        converged: out.converged,
        surrogate: false,
    })
}

/// Best-approximation dispatcher over the Lp scale (p = 1 surrogate,
/// p = 2 projection, finite p IRLS, sup exchange).
pub fn best_approx(f: &FunctionSpec, n: usize, p: Lp, weight: WeightExponents) -> Result<ApproxResult> {
    match p {
        Lp::Finite(q) if q == 2.0 => best_approx_l2(f, n, weight),
        Lp::Finite(q) => best_approx_lp(f, n, q, weight, 1e-7),
        Lp::Infinity => best_approx_sup(f, n, Interval::full(), 1e-6),
    }
}

/// Near-best approximant `P_{n,f}`: the exact projection at p = 2, the
/// delayed mean of the expansion otherwise (a bounded operator reproducing
/// polynomials of degree `<= n`, hence with error within a fixed factor of
/// `E_n`).
pub fn near_best(f: &FunctionSpec, n: usize, p: Lp, weight: WeightExponents) -> Result<BasisPolynomial> {
    if n == 0 {
        return Err(Error::invalid("near-best approximant needs n >= 1"));
    }
    let basis: JacobiIndex = weight.into();
    if matches!(p, Lp::Finite(q) if q == 2.0) {
        return Ok(analyze(f, basis, n)?.to_poly());
    }
    if let Some(d) = f.poly_degree() {
        if d <= n {
            // reproduction: the delayed mean returns f itself
            return Ok(analyze(f, basis, d)?.to_poly());
        }
    }
    let expansion = analyze(f, basis, (2 * n).min(crate::jacobi::MAX_DEGREE))?;
    let ell = cesaro_min_ell(p, weight, basis).min(4);
    Ok(vallee_poussin(&expansion, n, ell)?.to_poly())
}

/// Infimum over polynomials of the stated degree of
/// `|| (f - P) (w^{(a,b)})^{1/p} ||_{L_p(interval)}` (unweighted sup for
/// p = inf), via IRLS/exchange on interval-local grids.
pub fn local_best_error(
    f: &FunctionSpec,
    degree: usize,
    p: Lp,
    weight: WeightExponents,
    interval: Interval,
) -> Result<f64> {
    let m = (GRID_PER_DOF * (degree + 1)).max(64);
    let pts_raw = clustered_grid(interval, m, f.kinks());
    match p {
        Lp::Infinity => {
            let xs: Vec<f64> = pts_raw.iter().map(|&(x, _)| x).collect();
            let values: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
            Ok(exchange_on_grid(&xs, &values, degree, 1e-6)?.error)
        }
        Lp::Finite(p_req) => {
            let p_eff = if p_req == 1.0 { P1_SURROGATE } else { p_req };
            // local Legendre coordinates for conditioning
            let basis = JacobiIndex::legendre();
            let (lo, hi) = (interval.lo, interval.hi);
            let to_local = |x: f64| ((2.0 * x - lo - hi) / (hi - lo)).clamp(-1.0, 1.0);
            let pts: Vec<(f64, f64)> = pts_raw
                .iter()
                .map(|&(x, w)| (to_local(x), if w == 0.0 { 0.0 } else { w * weight.eval(x) }))
                .collect();
            let values: Vec<f64> = pts_raw.iter().map(|&(x, _)| f.eval(x)).collect();
            let out = irls(basis, degree, &pts, &values, p_eff, 1e-8, IRLS_MAX_ITER)?;
            let local = BasisPolynomial::new(basis, out.coeffs)?;
            let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = FnIntegrand::new(|x| f.eval(x) - local.eval(to_local(x)))
                .with_kinks(f.kinks().to_vec());
            crate::quad::weighted_lp_norm_with_floor(
                &diff,
                p_eff,
                weight,
                interval,
                1,
                1e-12 * (1.0 + scale),
            )
        }
    }
}

/// Sup norm of `f - p` over the interval (solver comparisons at p = inf).
pub fn sup_error(f: &FunctionSpec, p: &BasisPolynomial, interval: Interval) -> Result<f64> {
    let residual = FunctionSpec::minus_poly(f, p.clone());
    sup_norm(&residual, interval, 4096)
}
