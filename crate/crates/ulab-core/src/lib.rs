//! Numerical laboratory for weighted polynomial approximation on `[-1, 1]`:
//! Jacobi expansions, fractional spectral operators, best and near-best
//! approximation, K-functionals and Ditzian-Totik moduli, and experiment
//! drivers that sweep the associated inequalities and report fitted slopes
//! and uniform-constant summaries.

pub mod approximation;
pub mod error;
pub mod experiments;
pub mod funcs;
pub mod jacobi;
pub mod quad;
pub mod recurrence;
pub mod report;
pub mod smoothness;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use funcs::FunctionSpec;
pub use jacobi::{derivative_shift, eigenvalue, eval_orthonormal, eval_poly, BasisPolynomial};
pub use quad::{
    gauss_jacobi_rule, gauss_legendre_rule, jacobi_moments, product_norm, sup_norm,
    weighted_lp_norm, Integrand, QuadratureRule,
};
pub use spectral::{
    analyze, cesaro_mean, fractional_derivative, fractional_integral, partial_sum, synthesize,
    vallee_poussin, SpectralCoeffs,
};
pub use weights::{Interval, JacobiIndex, Lp, WeightExponents};
