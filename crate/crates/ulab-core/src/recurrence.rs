//! Three-term recurrence coefficients for monic polynomials orthogonal
//! with respect to the Jacobi weight `(1-x)^a (1+x)^b`.
//!
//! With `pi_{k+1}(x) = (x - alpha_k) pi_k(x) - beta_k pi_{k-1}(x)` and
//! `beta_0 = mu_0` (the total weight mass), these coefficients drive both
//! the Golub-Welsch quadrature construction and orthonormal evaluation.

use statrs::function::gamma::ln_gamma;

use crate::weights::WeightExponents;

/// Total mass `mu_0 = int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)`.
pub fn total_mass(w: WeightExponents) -> f64 {
    let (a, b) = (w.a, w.b);
    let ln = (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0);
    ln.exp()
}

/// Diagonal recurrence coefficient `alpha_k`.
pub fn alpha(w: WeightExponents, k: usize) -> f64 {
    let (a, b) = (w.a, w.b);
    if k == 0 {
        (b - a) / (a + b + 2.0)
    } else {
        let s = 2.0 * k as f64 + a + b;
        if a == b {
            0.0
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        }
    }
}

/// Off-diagonal recurrence coefficient `beta_k` (with `beta_0 = mu_0`).
///
/// The `k = 1` case uses the cancelled closed form so that `a + b -> -1`
/// (Chebyshev-adjacent indices) stays finite.
pub fn beta(w: WeightExponents, k: usize) -> f64 {
    let (a, b) = (w.a, w.b);
    match k {
        0 => total_mass(w),
        1 => {
            let s = a + b + 2.0;
            4.0 * (a + 1.0) * (b + 1.0) / (s * s * (s + 1.0))
        }
        _ => {
            let kf = k as f64;
            let s = 2.0 * kf + a + b;
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        }
    }
}
