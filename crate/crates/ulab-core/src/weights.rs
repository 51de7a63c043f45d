//! Domain types for Jacobi weights, basis indices, intervals, and Lp exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent pair `(a, b)` of the Jacobi weight `(1-x)^a (1+x)^b` on `[-1, 1]`.
///
/// Both exponents must exceed -1 so the weight is integrable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightExponents {
    /// Exponent of `(1 - x)`, controlling behaviour at `x = 1`.
    pub a: f64,
    /// Exponent of `(1 + x)`, controlling behaviour at `x = -1`.
    pub b: f64,
}

impl WeightExponents {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0 && a.is_finite()) {
            return Err(Error::invalid(format!("weight exponent a = {a} must be > -1")));
        }
        if !(b > -1.0 && b.is_finite()) {
            return Err(Error::invalid(format!("weight exponent b = {b} must be > -1")));
        }
        Ok(Self { a, b })
    }

    /// The Legendre weight `(a, b) = (0, 0)`.
    pub fn legendre() -> Self {
        Self { a: 0.0, b: 0.0 }
    }

    /// Value of the weight at `x`. Infinite at endpoints with negative exponents.
    pub fn eval(&self, x: f64) -> f64 {
        (1.0 - x).powf(self.a) * (1.0 + x).powf(self.b)
    }

    /// Shift both exponents by `h`, as in the two-weight inequalities.
    pub fn shifted(&self, da: f64, db: f64) -> Result<Self> {
        Self::new(self.a + da, self.b + db)
    }

    /// True when the factor at the given endpoint is not a polynomial,
    /// i.e. the exponent is negative or non-integer.
    pub fn nonsmooth_at_plus_one(&self) -> bool {
        self.a < 0.0 || self.a.fract() != 0.0
    }

    pub fn nonsmooth_at_minus_one(&self) -> bool {
        self.b < 0.0 || self.b.fract() != 0.0
    }
}

/// Index pair `(alpha, beta)` of the Jacobi polynomial system `psi_k^{(alpha,beta)}`.
///
/// Structurally the same constraint as [`WeightExponents`]; kept distinct
/// because one names the norm weight and the other the operator basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiIndex {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiIndex {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("Jacobi index alpha = {alpha} must be > -1")));
        }
        if !(beta > -1.0 && beta.is_finite()) {
            return Err(Error::invalid(format!("Jacobi index beta = {beta} must be > -1")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn legendre() -> Self {
        Self { alpha: 0.0, beta: 0.0 }
    }

    pub fn chebyshev() -> Self {
        Self { alpha: -0.5, beta: -0.5 }
    }

    /// The weight this system is orthogonal against.
    pub fn weight(&self) -> WeightExponents {
        WeightExponents { a: self.alpha, b: self.beta }
    }

    /// Basis index raised by `r` in both components, the home of `r`-th
    /// derivatives of this system.
    pub fn raised(&self, r: usize) -> Self {
        Self { alpha: self.alpha + r as f64, beta: self.beta + r as f64 }
    }
}

impl From<WeightExponents> for JacobiIndex {
    fn from(w: WeightExponents) -> Self {
        Self { alpha: w.a, beta: w.b }
    }
}

impl From<JacobiIndex> for WeightExponents {
    fn from(j: JacobiIndex) -> Self {
        Self { a: j.alpha, b: j.beta }
    }
}

/// A closed subinterval of `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(-1.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::invalid(format!(
                "interval [{lo}, {hi}] must satisfy -1 <= lo < hi <= 1"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn full() -> Self {
        Self { lo: -1.0, hi: 1.0 }
    }

    pub fn is_full(&self) -> bool {
        self.lo == -1.0 && self.hi == 1.0
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// An Lp exponent: finite `p >= 1` or the uniform norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lp {
    Finite(f64),
    Infinity,
}

impl Lp {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Lp::Infinity);
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::invalid(format!("Lp exponent p = {p} must be >= 1 or infinity")));
        }
        Ok(Lp::Finite(p))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Lp::Infinity)
    }

    /// The numeric value, `f64::INFINITY` for the sup norm.
    pub fn value(&self) -> f64 {
        match self {
            Lp::Finite(p) => *p,
            Lp::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, with the convention `1/inf = 0`.
    pub fn reciprocal(&self) -> f64 {
        match self {
            Lp::Finite(p) => 1.0 / p,
            Lp::Infinity => 0.0,
        }
    }
}

impl serde::Serialize for Lp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Lp::Finite(p) => s.serialize_f64(*p),
            Lp::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Lp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Lp::new(p).map_err(DeError::custom),
            Raw::Str(s) if s == "inf" || s == "infinity" => Ok(Lp::Infinity),
            Raw::Str(s) => Err(DeError::custom(format!("unrecognized Lp exponent {s:?}"))),
        }
    }
}
