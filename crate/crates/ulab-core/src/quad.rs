//! Gauss-Jacobi quadrature and weighted Lp / uniform norms on `[-1, 1]`
//! and subintervals, robust to endpoint singularities for exponents in `(-1, 0)`.
//!
//! Rules are built by the Golub-Welsch method: the symmetric tridiagonal
//! eigenproblem assembled from the monic Jacobi recurrence coefficients.
//! Subinterval and kinked integrands go through a composite Gauss-Legendre
//! panel scheme with the weight folded into the integrand and panels
//! geometrically refined toward non-smooth points.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::recurrence;
use crate::weights::{Interval, WeightExponents};

/// Relative agreement between successive refinements at which the adaptive
/// drivers stop.
pub const REFINE_TOL: f64 = 1e-9;
/// Cap on uniform panels per segment in the composite scheme.
pub const MAX_PANELS: usize = 4096;
/// Gauss-Legendre points per panel.
const PANEL_POINTS: usize = 64;
/// Dyadic refinement depth toward a non-smooth point.
const GEOMETRIC_DEPTH: usize = 40;
/// Cap on the order of a single full-interval Gauss-Jacobi rule.
const MAX_RULE_ORDER: usize = 1 << 14;

/// Something the norm evaluators can integrate: a pointwise evaluation plus
/// structural metadata (kink abscissae, polynomial degree when known).
pub trait Integrand: Sync {
    fn eval(&self, x: f64) -> f64;

    /// Interior abscissae where the integrand loses smoothness.
    fn kinks(&self) -> &[f64] {
        &[]
    }

    /// Exact polynomial degree, when the integrand is a polynomial.
    fn degree_hint(&self) -> Option<usize> {
        None
    }
}

/// Closure-backed integrand for ad-hoc wrappers (products, differences).
pub struct FnIntegrand<'a> {
    eval: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    kinks: Vec<f64>,
    degree: Option<usize>,
}

impl<'a> FnIntegrand<'a> {
    pub fn new(eval: impl Fn(f64) -> f64 + Sync + 'a) -> Self {
        Self { eval: Box::new(eval), kinks: Vec::new(), degree: None }
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = Some(degree);
        self
    }
}

impl Integrand for FnIntegrand<'_> {
    fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    fn degree_hint(&self) -> Option<usize> {
        self.degree
    }
}

/// An n-point rule integrating polynomials of degree `<= 2n-1` exactly
/// against a Jacobi weight on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub weight: WeightExponents,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Weighted sum `sum_i w_i g(x_i)`, approximating `int g w^{(a,b)}`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// Moments `m_k = int_{-1}^{1} x^k (1-x)^a (1+x)^b dx` for `k = 0..=max_degree`,
/// by the exact Beta-function recursion (no numerical integration).
pub fn jacobi_moments(weight: WeightExponents, max_degree: usize) -> Vec<f64> {
    let (a, b) = (weight.a, weight.b);
    let mut m = Vec::with_capacity(max_degree + 1);
    m.push(recurrence::total_mass(weight));
    if max_degree >= 1 {
        m.push((b - a) / (a + b + 2.0) * m[0]);
    }
    for k in 1..max_degree {
        let kf = k as f64;
        let next = ((b - a) * m[k] + kf * m[k - 1]) / (kf + a + b + 2.0);
        m.push(next);
    }
    m
}

/// Symmetric tridiagonal QL with implicit shifts, accumulating only the
/// first component of each eigenvector (all that Golub-Welsch needs).
///
/// `d` holds the diagonal and is replaced by the ascending eigenvalues,
/// `e` the subdiagonal in `e[0..n-1]`, and `z` the tracked vector
/// (initialized to `e_0`).
fn imtqlx(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let max_iter = 60;
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= eps * (d[m].abs() + d[m + 1].abs()) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter >= max_iter {
                return Err(Error::numerical(format!(
                    "tridiagonal QL failed to converge at row {l} after {max_iter} iterations"
                )));
            }
            iter += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let bb = c * e[i];
                if f.abs() >= g.abs() {
                    c = g / f;
                    r = c.hypot(1.0);
                    e[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = s.hypot(1.0);
                    e[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // sort eigenvalues ascending, permuting z alongside
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("non-finite eigenvalue"));
    let ds: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let zs: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
    d.copy_from_slice(&ds);
    z.copy_from_slice(&zs);
    Ok(())
}

fn build_gauss_jacobi(weight: WeightExponents, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid("quadrature order must be >= 1"));
    }
    let mut d: Vec<f64> = (0..n).map(|k| recurrence::alpha(weight, k)).collect();
    let mut e: Vec<f64> = (1..n).map(|k| recurrence::beta(weight, k).sqrt()).collect();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    imtqlx(&mut d, &mut e, &mut z)?;

    let mu0 = recurrence::total_mass(weight);
    let weights: Vec<f64> = z.iter().map(|&zi| mu0 * zi * zi).collect();

    for i in 0..n {
        if !(d[i] > -1.0 && d[i] < 1.0) {
            return Err(Error::numerical(format!("node {} = {} outside (-1, 1)", i, d[i])));
        }
        if i + 1 < n && !(d[i] < d[i + 1]) {
            return Err(Error::numerical(format!("nodes not strictly increasing at {i}")));
        }
        if !(weights[i] > 0.0) {
            return Err(Error::numerical(format!("weight {} = {} not positive", i, weights[i])));
        }
    }
    Ok(QuadratureRule { weight, nodes: d, weights })
}

type RuleCache = Mutex<HashMap<(u64, u64, usize), Arc<QuadratureRule>>>;

fn rule_cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The n-point Gauss-Jacobi rule for the given weight, from a process-wide
/// cache (rules are immutable once built).
pub fn gauss_jacobi_rule(weight: WeightExponents, n: usize) -> Result<Arc<QuadratureRule>> {
    let key = (weight.a.to_bits(), weight.b.to_bits(), n);
    if let Some(rule) = rule_cache().lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(build_gauss_jacobi(weight, n)?);
    rule_cache().lock().unwrap().insert(key, rule.clone());
    Ok(rule)
}

/// Gauss-Legendre rule (Jacobi with zero exponents).
pub fn gauss_legendre_rule(n: usize) -> Result<Arc<QuadratureRule>> {
    gauss_jacobi_rule(WeightExponents::legendre(), n)
}

/// Panel edges for one smooth segment `[u, v]`: `base` uniform panels, with
/// the end panel replaced by a dyadic cascade toward any flagged endpoint.
/// Cascade edges stop a few ulps short of the endpoint so no panel falls
/// below the float resolution there.
fn segment_edges(u: f64, v: f64, base: usize, refine_left: bool, refine_right: bool) -> Vec<f64> {
    let mut edges = Vec::with_capacity(base + 2 * GEOMETRIC_DEPTH + 2);
    let h = (v - u) / base as f64;
    let gap_l = 8.0 * f64::EPSILON * (1.0 + u.abs());
    let gap_r = 8.0 * f64::EPSILON * (1.0 + v.abs());
    edges.push(u);
    if refine_left {
        // cascade u + h*2^-j, deepest first
        for j in (1..=GEOMETRIC_DEPTH).rev() {
            let x = u + h * 0.5f64.powi(j as i32);
            if x > *edges.last().unwrap() && x < v && x - u > gap_l {
                edges.push(x);
            }
        }
    }
    for i in 1..base {
        let x = u + h * i as f64;
        if x > *edges.last().unwrap() {
            edges.push(x);
        }
    }
    if refine_right {
        for j in 1..=GEOMETRIC_DEPTH {
            let x = v - h * 0.5f64.powi(j as i32);
            if x > *edges.last().unwrap() && x < v && v - x > gap_r {
                edges.push(x);
            }
        }
    }
    edges.push(v);
    edges
}

/// Node/weight pairs of the composite mesh over `[lo, hi]` with the Jacobi
/// weight folded into the point weights. Segments are cut at the supplied
/// kinks; panels refine toward kinks and toward `+-1` whenever the weight
/// factor there is non-smooth.
pub fn composite_points(
    weight: WeightExponents,
    interval: Interval,
    kinks: &[f64],
    base: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut breaks: Vec<f64> = vec![interval.lo];
    for &k in kinks {
        if k > interval.lo && k < interval.hi {
            breaks.push(k);
        }
    }
    breaks.push(interval.hi);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    let rule = gauss_legendre_rule(PANEL_POINTS)?;
    let singular_hi = weight.nonsmooth_at_plus_one();
    let singular_lo = weight.nonsmooth_at_minus_one();
    let mut points = Vec::new();
    for s in 0..breaks.len() - 1 {
        let (u, v) = (breaks[s], breaks[s + 1]);
        if v - u < 1e-15 {
            continue;
        }
        let refine_left = (s > 0) || (u == -1.0 && singular_lo);
        let refine_right = (s + 2 < breaks.len()) || (v == 1.0 && singular_hi);
        let edges = segment_edges(u, v, base, refine_left, refine_right);
        for w in edges.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            // endpoint gaps computed edge-wise stay exact down to the float
            // grid, so deep cascade panels keep full relative precision in
            // the weight even where the node x itself rounds coarsely
            let gap_hi = 0.5 * ((1.0 - w[0]) + (1.0 - w[1]));
            let gap_lo = 0.5 * ((w[0] + 1.0) + (w[1] + 1.0));
            if w[1] == 1.0 && singular_hi {
                // absorb the (1-x)^a factor into a mapped one-sided Jacobi
                // rule: 1 - x = half * (1 - t) exactly on this panel
                let jr = gauss_jacobi_rule(WeightExponents { a: weight.a, b: 0.0 }, PANEL_POINTS)?;
                let scale = half.powf(1.0 + weight.a);
                for (&t, &wt) in jr.nodes.iter().zip(&jr.weights) {
                    let x = mid + half * t;
                    points.push((x, wt * scale * (gap_lo + half * t).powf(weight.b)));
                }
            } else if w[0] == -1.0 && singular_lo {
                let jr = gauss_jacobi_rule(WeightExponents { a: 0.0, b: weight.b }, PANEL_POINTS)?;
                let scale = half.powf(1.0 + weight.b);
                for (&t, &wt) in jr.nodes.iter().zip(&jr.weights) {
                    let x = mid + half * t;
                    points.push((x, wt * scale * (gap_hi - half * t).powf(weight.a)));
                }
            } else {
                for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
                    let x = mid + half * t;
                    let wx = (gap_hi - half * t).powf(weight.a) * (gap_lo + half * t).powf(weight.b);
                    points.push((x, wt * half * wx));
                }
            }
        }
    }
    Ok(points)
}

/// Composite integral of `g * w^{(a,b)}` over `[lo, hi]` at a fixed panel
/// budget.
fn composite_pass(
    g: &dyn Integrand,
    weight: WeightExponents,
    interval: Interval,
    base: usize,
) -> Result<f64> {
    let points = composite_points(weight, interval, g.kinks(), base)?;
    let total: f64 = points.iter().map(|&(x, w)| w * g.eval(x)).sum();
    if !total.is_finite() {
        return Err(Error::numerical("composite quadrature produced a non-finite value"));
    }
    Ok(total)
}

/// `int_lo^hi g(x) w^{(a,b)}(x) dx` with adaptive refinement.
///
/// Full-interval smooth integrands use a single Gauss-Jacobi rule with
/// order doubling; anything else goes through the composite panel scheme
/// with panel-count doubling, in both cases until two successive
/// refinements agree to [`REFINE_TOL`] relative. `abs_floor` declares the
/// magnitude below which the caller does not need accuracy: once the
/// running value is that small the refinement stops (residual-type
/// integrands sit at the evaluation noise floor and would otherwise never
/// stabilize in relative terms).
pub fn integrate_weighted_with_floor(
    g: &dyn Integrand,
    weight: WeightExponents,
    interval: Interval,
    resolution: usize,
    abs_floor: f64,
) -> Result<f64> {
    if interval.length() < 1e-15 {
        return Err(Error::numerical("interval collapses under floating point"));
    }
    let resolution = resolution.max(1);
    let stable = |next: f64, value: f64| {
        (next - value).abs() <= REFINE_TOL * (next.abs() + 1e-300) + abs_floor
    };

    if interval.is_full() && g.kinks().iter().all(|&k| k <= -1.0 || k >= 1.0) {
        // polynomial integrands of known degree are captured exactly
        let exact_order = g.degree_hint().map(|d| d / 2 + 1);
        let mut order = (64 * resolution).max(exact_order.unwrap_or(0)).min(MAX_RULE_ORDER);
        let mut value = gauss_jacobi_rule(weight, order)?.integrate(|x| g.eval(x));
        if exact_order.is_some_and(|m| m <= order) {
            if !value.is_finite() {
                return Err(Error::numerical("quadrature produced a non-finite value"));
            }
            return Ok(value);
        }
        while order < MAX_RULE_ORDER && value.abs() > abs_floor {
            order *= 2;
            let next = gauss_jacobi_rule(weight, order)?.integrate(|x| g.eval(x));
            let done = stable(next, value);
            value = next;
            if done {
                break;
            }
        }
        if !value.is_finite() {
            return Err(Error::numerical("quadrature produced a non-finite value"));
        }
        return Ok(value);
    }

    let mut base = (16 * resolution).min(MAX_PANELS);
    if let Some(d) = g.degree_hint() {
        // resolve oscillation of high-degree polynomials up front
        while base * PANEL_POINTS < 2 * d && base < MAX_PANELS {
            base *= 2;
        }
    }
    let mut value = composite_pass(g, weight, interval, base)?;
    while base < MAX_PANELS && value.abs() > abs_floor {
        base *= 2;
        let next = composite_pass(g, weight, interval, base)?;
        let done = stable(next, value);
        value = next;
        if done {
            break;
        }
    }
    Ok(value)
}

/// [`integrate_weighted_with_floor`] without a noise floor.
pub fn integrate_weighted(
    g: &dyn Integrand,
    weight: WeightExponents,
    interval: Interval,
    resolution: usize,
) -> Result<f64> {
    integrate_weighted_with_floor(g, weight, interval, resolution, 0.0)
}

/// Abscissae where `f` changes sign, located by an arc-clustered scan and
/// bisection; `|f|^p` loses smoothness exactly there for non-even `p`.
pub fn sign_change_points(f: &dyn Integrand, interval: Interval, samples: usize) -> Vec<f64> {
    let n = samples.max(16);
    let mid = 0.5 * (interval.hi + interval.lo);
    let half = 0.5 * (interval.hi - interval.lo);
    let xs: Vec<f64> = (0..=n)
        .map(|j| mid + half * (std::f64::consts::PI * (n - j) as f64 / n as f64).cos())
        .collect();
    let mut out = Vec::new();
    let mut prev_x = xs[0];
    let mut prev_v = f.eval(prev_x);
    for &x in &xs[1..] {
        let v = f.eval(x);
        if prev_v != 0.0 && v != 0.0 && (prev_v > 0.0) != (v > 0.0) {
            let (mut lo, mut hi) = (prev_x, x);
            let (mut flo, _) = (prev_v, v);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if hi - lo < 4.0 * f64::EPSILON * (1.0 + m.abs()) {
                    break;
                }
                let fm = f.eval(m);
                if fm == 0.0 {
                    lo = m;
                    break;
                }
                if (fm > 0.0) == (flo > 0.0) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_v = v;
    }
    out
}

/// `( int_lo^hi |f|^p w^{(a,b)} dx )^{1/p}` for finite `p >= 1`, refined
/// only down to the optional norm floor (values at or below `norm_floor`
/// are returned at scan accuracy).
pub fn weighted_lp_norm_with_floor(
    f: &dyn Integrand,
    p: f64,
    weight: WeightExponents,
    interval: Interval,
    resolution: usize,
    norm_floor: f64,
) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p = {p} must be finite and >= 1")));
    }
    let even_power = p.fract() == 0.0 && (p as u64) % 2 == 0;
    let degree = if p.fract() == 0.0 { f.degree_hint().map(|d| d * p as usize) } else { None };

    let mut kinks = f.kinks().to_vec();
    if !even_power {
        // |f|^p is only C^{floor(p)} at sign changes; split panels there
        let scan = f.degree_hint().map_or(512, |d| (4 * d).clamp(512, 4096));
        kinks.extend(sign_change_points(f, interval, scan));
    }

    let mut wrapped = FnIntegrand::new(|x| f.eval(x).abs().powf(p)).with_kinks(kinks);
    if let Some(d) = degree {
        wrapped = wrapped.with_degree(d);
    }
    let abs_floor = if norm_floor > 0.0 { norm_floor.powf(p) } else { 0.0 };
    let integral = integrate_weighted_with_floor(&wrapped, weight, interval, resolution, abs_floor)?;
    if integral < 0.0 && integral > -1e-14 {
        return Ok(0.0);
    }
    if integral < 0.0 {
        return Err(Error::numerical(format!("norm integral {integral} is negative")));
    }
    Ok(integral.powf(1.0 / p))
}

/// `( int_lo^hi |f|^p w^{(a,b)} dx )^{1/p}` for finite `p >= 1`.
pub fn weighted_lp_norm(
    f: &dyn Integrand,
    p: f64,
    weight: WeightExponents,
    interval: Interval,
    resolution: usize,
) -> Result<f64> {
    weighted_lp_norm_with_floor(f, p, weight, interval, resolution, 0.0)
}

/// `max |f|` over a Chebyshev-clustered sample plus all declared kinks.
///
/// The sample is the Chebyshev-Lobatto set of the next power of two above
/// `resolution`, so enlarging the resolution only adds points and the
/// result is monotone nondecreasing in `resolution`.
pub fn sup_norm(f: &dyn Integrand, interval: Interval, resolution: usize) -> Result<f64> {
    let n = resolution.max(32).next_power_of_two();
    let mid = 0.5 * (interval.hi + interval.lo);
    let half = 0.5 * (interval.hi - interval.lo);
    let mut best: f64 = 0.0;
    for j in 0..=n {
        let x = mid + half * (std::f64::consts::PI * j as f64 / n as f64).cos();
        let v = f.eval(x.clamp(interval.lo, interval.hi)).abs();
        if !v.is_finite() {
            return Err(Error::numerical(format!("integrand non-finite at x = {x}")));
        }
        best = best.max(v);
    }
    for &k in f.kinks() {
        if interval.contains(k) {
            best = best.max(f.eval(k).abs());
        }
    }
    Ok(best)
}

/// Norm in `L_p(w^{(a,b)})` over the interval, dispatching on the exponent:
/// finite `p` is the weighted integral norm, `p = inf` the plain sup norm
/// (the weighted space at infinity carries the uniform norm).
pub fn lp_norm(
    f: &dyn Integrand,
    p: crate::weights::Lp,
    weight: WeightExponents,
    interval: Interval,
    resolution: usize,
) -> Result<f64> {
    lp_norm_with_floor(f, p, weight, interval, resolution, 0.0)
}

/// [`lp_norm`] with a noise floor for the finite-p integral refinement.
pub fn lp_norm_with_floor(
    f: &dyn Integrand,
    p: crate::weights::Lp,
    weight: WeightExponents,
    interval: Interval,
    resolution: usize,
    norm_floor: f64,
) -> Result<f64> {
    match p {
        crate::weights::Lp::Finite(p) => {
            weighted_lp_norm_with_floor(f, p, weight, interval, resolution, norm_floor)
        }
        crate::weights::Lp::Infinity => sup_norm(f, interval, resolution.max(1024)),
    }
}

/// Norm of the pointwise product `f(x) * w^{(c,d)}(x)` in the unweighted Lp
/// over the interval, i.e. `|| f w^{(c,d)} ||_p`.
///
/// For finite `p` this folds the product into the weight exponents
/// (`(pc, pd)` must stay above -1); at `p = infinity` it is the sup of the
/// product, which in the experiments only arises for nonnegative exponent
/// pairs so the product stays finite.
pub fn product_norm(
    f: &dyn Integrand,
    factor: WeightExponents,
    p: crate::weights::Lp,
    interval: Interval,
    resolution: usize,
) -> Result<f64> {
    use crate::weights::Lp;
    match p {
        Lp::Finite(p) => {
            let folded = WeightExponents::new(p * factor.a, p * factor.b).map_err(|_| {
                Error::invalid(format!(
                    "product norm needs p*c, p*d > -1, got p = {p}, (c, d) = ({}, {})",
                    factor.a, factor.b
                ))
            })?;
            weighted_lp_norm(f, p, folded, interval, resolution)
        }
        Lp::Infinity => {
            let wrapped = FnIntegrand::new(|x| f.eval(x) * factor.eval(x))
                .with_kinks(f.kinks().to_vec());
            sup_norm(&wrapped, interval, resolution)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::gamma::ln_gamma;

    fn w(a: f64, b: f64) -> WeightExponents {
        WeightExponents::new(a, b).unwrap()
    }

    /// Independent moment oracle: expand x^m around x = 1 - 2t and sum
    /// Beta integrals, m_m = 2^{a+b+1} sum_j C(m,j) (-2)^j B(a+1+j, b+1).
    fn beta_sum_moment(a: f64, b: f64, m: usize) -> f64 {
        let mut sum = 0.0;
        let mut binom = 1.0;
        for j in 0..=m {
            let lnbeta = ln_gamma(a + 1.0 + j as f64) + ln_gamma(b + 1.0)
                - ln_gamma(a + b + 2.0 + j as f64);
            sum += binom * (-2.0f64).powi(j as i32) * lnbeta.exp();
            binom *= (m - j) as f64 / (j + 1) as f64;
        }
        2.0f64.powf(a + b + 1.0) * sum
    }

    #[test]
    fn moments_match_frozen_values() {
        let m = jacobi_moments(w(0.0, 0.0), 4);
        assert_relative_eq!(m[0], 2.0, max_relative = 1e-14);
        assert_relative_eq!(m[1], 0.0, epsilon = 1e-16);
        assert_relative_eq!(m[2], 2.0 / 3.0, max_relative = 1e-14);
        // 2^2 * B(2, 1) = 4 * 1/2
        let m10 = jacobi_moments(w(1.0, 0.0), 0);
        assert_relative_eq!(m10[0], 2.0, max_relative = 1e-13);
        // Chebyshev weight: m0 = pi, m2 = pi/2
        let mc = jacobi_moments(w(-0.5, -0.5), 2);
        assert_relative_eq!(mc[0], std::f64::consts::PI, max_relative = 1e-13);
        assert_relative_eq!(mc[2], std::f64::consts::PI / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn moments_match_beta_sum_oracle() {
        // the alternating Beta sum cancels by ~2^m, so keep m moderate and
        // allow for the oracle's own rounding
        for (a, b) in [(0.0, 0.0), (-0.5, -0.5), (1.3, 0.7), (0.5, -0.3)] {
            let m = jacobi_moments(w(a, b), 8);
            for (k, &mk) in m.iter().enumerate() {
                let oracle = beta_sum_moment(a, b, k);
                assert_relative_eq!(mk, oracle, max_relative = 5e-9, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn one_and_two_point_rules() {
        let r = gauss_jacobi_rule(w(0.0, 0.0), 1).unwrap();
        assert_relative_eq!(r.nodes[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(r.weights[0], 2.0, max_relative = 1e-14);

        let r2 = gauss_jacobi_rule(w(0.0, 0.0), 2).unwrap();
        let inv_sqrt3 = 1.0 / 3.0f64.sqrt();
        assert_relative_eq!(r2.nodes[0], -inv_sqrt3, max_relative = 1e-13);
        assert_relative_eq!(r2.nodes[1], inv_sqrt3, max_relative = 1e-13);
        assert_relative_eq!(r2.weights[0], 1.0, max_relative = 1e-13);
        assert_relative_eq!(r2.weights[1], 1.0, max_relative = 1e-13);

        // general one-point rule: node (b-a)/(a+b+2), weight mu_0
        let rj = gauss_jacobi_rule(w(1.3, 0.7), 1).unwrap();
        assert_relative_eq!(rj.nodes[0], (0.7 - 1.3) / 4.0, max_relative = 1e-13);
        assert_relative_eq!(rj.weights[0], jacobi_moments(w(1.3, 0.7), 0)[0], max_relative = 1e-13);
    }

    #[test]
    fn rules_reproduce_moments() {
        for (a, b) in [(0.0, 0.0), (-0.5, -0.5), (1.3, 0.7), (0.5, -0.3)] {
            for n in [1usize, 2, 3, 5, 8, 16] {
                let rule = gauss_jacobi_rule(w(a, b), n).unwrap();
                let moments = jacobi_moments(w(a, b), 2 * n - 1);
                for (m, &target) in moments.iter().enumerate() {
                    let got = rule.integrate(|x| x.powi(m as i32));
                    assert!(
                        (got - target).abs() <= 1e-10 * (1.0 + target.abs()),
                        "degree {m} moment off for ({a},{b}) n={n}: {got} vs {target}"
                    );
                }
            }
        }
    }

    #[test]
    fn high_order_rule_is_sane() {
        let rule = gauss_jacobi_rule(w(0.5, -0.3), 512).unwrap();
        let m = jacobi_moments(w(0.5, -0.3), 6);
        for k in 0..=6 {
            let got = rule.integrate(|x| x.powi(k as i32));
            assert_relative_eq!(got, m[k], max_relative = 1e-11, epsilon = 1e-13);
        }
    }

    #[test]
    fn full_interval_norms() {
        let one = FnIntegrand::new(|_| 1.0).with_degree(0);
        let n = weighted_lp_norm(&one, 2.0, w(0.0, 0.0), Interval::full(), 1).unwrap();
        assert_relative_eq!(n, 2.0f64.sqrt(), max_relative = 1e-13);

        for (a, b, p) in [(1.3, 0.7, 3.0), (0.5, -0.3, 1.0), (-0.5, -0.5, 2.0)] {
            let m0 = jacobi_moments(w(a, b), 0)[0];
            let n = weighted_lp_norm(&one, p, w(a, b), Interval::full(), 1).unwrap();
            assert_relative_eq!(n, m0.powf(1.0 / p), max_relative = 1e-12);
        }
    }

    #[test]
    fn subinterval_norm_against_closed_forms() {
        // int_{1/2}^{1} x dx = 3/8
        let f = FnIntegrand::new(|x| x).with_degree(1);
        let n = weighted_lp_norm(&f, 1.0, w(0.0, 0.0), Interval::new(0.5, 1.0).unwrap(), 1).unwrap();
        assert_relative_eq!(n, 0.375, max_relative = 1e-11);

        // singular weight on an edge interval: int_{1-d}^{1} (1-x)^{-1/2} dx = 2 sqrt(d)
        let one = FnIntegrand::new(|_| 1.0);
        for d in [1e-2, 1e-4, 1e-6] {
            let n = weighted_lp_norm(&one, 1.0, w(-0.5, 0.0), Interval::new(1.0 - d, 1.0).unwrap(), 1)
                .unwrap();
            assert_relative_eq!(n, 2.0 * d.sqrt(), max_relative = 1e-9);
        }
    }

    #[test]
    fn kinked_integrand_is_split() {
        // int_{-1}^{1} |x| dx = 1, kink declared at 0
        let f = FnIntegrand::new(|x: f64| x.abs()).with_kinks(vec![0.0]);
        let n = weighted_lp_norm(&f, 1.0, w(0.0, 0.0), Interval::full(), 1).unwrap();
        assert_relative_eq!(n, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn interval_monotonicity() {
        let f = FnIntegrand::new(|x: f64| (3.0 * x).cos() + 0.2);
        let inner = weighted_lp_norm(&f, 2.0, w(0.5, -0.3), Interval::new(-0.5, 0.5).unwrap(), 1).unwrap();
        let outer = weighted_lp_norm(&f, 2.0, w(0.5, -0.3), Interval::full(), 1).unwrap();
        assert!(inner <= outer);
    }

    #[test]
    fn holder_consistency_on_polynomials() {
        for (a, b) in [(0.0, 0.0), (1.3, 0.7)] {
            let m0 = jacobi_moments(w(a, b), 0)[0];
            let f = FnIntegrand::new(|x| 1.0 + x + 0.5 * x * x).with_degree(2);
            for (p, q) in [(1.0, 2.0), (2.0, 4.0), (1.5, 3.0)] {
                let np = weighted_lp_norm(&f, p, w(a, b), Interval::full(), 1).unwrap();
                let nq = weighted_lp_norm(&f, q, w(a, b), Interval::full(), 1).unwrap();
                assert!(np <= nq * m0.powf(1.0 / p - 1.0 / q) * (1.0 + 1e-8));
            }
        }
    }

    #[test]
    fn sup_norm_basics() {
        let f = FnIntegrand::new(|x| x);
        assert_relative_eq!(sup_norm(&f, Interval::full(), 64).unwrap(), 1.0, epsilon = 1e-14);
        let z = FnIntegrand::new(|_| 0.0);
        assert_eq!(sup_norm(&z, Interval::full(), 64).unwrap(), 0.0);
        // monotone under doubling the resolution
        let g = FnIntegrand::new(|x: f64| (20.0 * x).sin());
        let mut prev = 0.0;
        for res in [32, 64, 128, 256, 512] {
            let v = sup_norm(&g, Interval::full(), res).unwrap();
            assert!(v + 1e-15 >= prev);
            prev = v;
        }
    }

    #[test]
    fn collapsed_interval_is_error() {
        let f = FnIntegrand::new(|_| 1.0);
        let i = Interval { lo: 0.5, hi: 0.5 + 1e-16 };
        assert!(weighted_lp_norm(&f, 2.0, w(0.0, 0.0), i, 1).is_err());
    }
}

