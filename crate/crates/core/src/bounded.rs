use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A real estimate with an absolute error bound.
///
/// Sums add bounds. Products, quotients and logarithms use first-order
/// propagation doubled as a safety factor; this is not interval arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedValue {
    pub estimate: f64,
    pub error_bound: f64,
}

impl BoundedValue {
    pub fn new(estimate: f64, error_bound: f64) -> Self {
        debug_assert!(error_bound >= 0.0, "negative error bound {error_bound}");
        Self {
            estimate,
            error_bound: error_bound.abs(),
        }
    }

    pub fn exact(estimate: f64) -> Self {
        Self::new(estimate, 0.0)
    }

    /// A computed value whose only error is `ulps` roundings relative to it.
    pub fn rounded(estimate: f64, ulps: f64) -> Self {
        Self::new(estimate, ulps * f64::EPSILON * estimate.abs())
    }

    pub fn lo(&self) -> f64 {
        self.estimate - self.error_bound
    }

    pub fn hi(&self) -> f64 {
        self.estimate + self.error_bound
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    /// Positive beyond the error bound.
    pub fn is_certainly_positive(&self) -> bool {
        self.estimate > self.error_bound
    }

    /// Negative beyond the error bound.
    pub fn is_certainly_negative(&self) -> bool {
        self.estimate < -self.error_bound
    }

    pub fn ln(self) -> Self {
        let x = self.estimate;
        let v = x.ln();
        Self::new(v, 2.0 * self.error_bound / x.abs() + f64::EPSILON * v.abs())
    }

    /// `ln(1 + self)`, accurate when `self` is tiny.
    pub fn ln_1p(self) -> Self {
        let x = self.estimate;
        let v = x.ln_1p();
        Self::new(v, 2.0 * self.error_bound / (1.0 + x).abs() + f64::EPSILON * v.abs())
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(self.estimate * c, self.error_bound * c.abs())
    }
}

impl From<f64> for BoundedValue {
    fn from(x: f64) -> Self {
        Self::exact(x)
    }
}

impl Add for BoundedValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let v = self.estimate + rhs.estimate;
        Self::new(v, self.error_bound + rhs.error_bound + f64::EPSILON * v.abs())
    }
}

impl Sub for BoundedValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for BoundedValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.estimate, self.error_bound)
    }
}

impl Mul for BoundedValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let v = self.estimate * rhs.estimate;
        let first_order = self.estimate.abs() * rhs.error_bound + rhs.estimate.abs() * self.error_bound;
        Self::new(v, 2.0 * first_order + f64::EPSILON * v.abs())
    }
}

impl Div for BoundedValue {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let d = rhs.estimate;
        let v = self.estimate / d;
        let first_order = self.error_bound / d.abs() + self.estimate.abs() * rhs.error_bound / (d * d);
        Self::new(v, 2.0 * first_order + f64::EPSILON * v.abs())
    }
}
