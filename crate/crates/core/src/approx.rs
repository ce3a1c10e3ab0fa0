//! A floating estimate paired with a rigorous absolute error bound.
//!
//! Every operation propagates bounds outward: the true quantity always lies
//! in `[value - abs_error, value + abs_error]`. Bounds only grow, never
//! shrink. The per-operation rounding unit is `f64::EPSILON` (twice the unit
//! roundoff, which already over-covers one correctly rounded operation), and
//! each computed error expression is additionally inflated by [`OUTWARD`] to
//! absorb the rounding of the error arithmetic itself.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::traits::{One, Zero};

/// Per-operation rounding unit: |fl(z) - z| <= EPS * |fl(z)| for one
/// correctly rounded +,-,*,/ (with a factor-2 margin).
pub(crate) const EPS: f64 = f64::EPSILON;

/// Multiplicative inflation applied to every computed error bound. 1e-12
/// relative slack dwarfs the handful of roundings inside each bound formula.
pub(crate) const OUTWARD: f64 = 1.0 + 1e-12;

#[inline]
pub(crate) fn inflate(err: f64) -> f64 {
    err * OUTWARD
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxValue {
    value: f64,
    abs_error: f64,
}

impl ApproxValue {
    /// A value known exactly (the float *is* the true quantity).
    pub fn exact(value: f64) -> Self {
        debug_assert!(value.is_finite());
        Self {
            value,
            abs_error: 0.0,
        }
    }

    /// A value with a caller-supplied rigorous bound.
    pub fn with_error(value: f64, abs_error: f64) -> Self {
        assert!(abs_error >= 0.0, "error bound must be nonnegative");
        Self { value, abs_error }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn abs_error(&self) -> f64 {
        self.abs_error
    }

    pub fn lower_bound(&self) -> f64 {
        self.value - self.abs_error
    }

    pub fn upper_bound(&self) -> f64 {
        self.value + self.abs_error
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower_bound() <= x && x <= self.upper_bound()
    }

    /// e^x with the bound pushed through the exponential. Allows 2 ulp for
    /// each libm call on top of the interval endpoints.
    pub fn exp(&self) -> Self {
        let value = self.value.exp();
        let hi = (self.value + self.abs_error).exp() * (1.0 + 2.0 * EPS);
        let lo = (self.value - self.abs_error).exp() * (1.0 - 2.0 * EPS);
        let err = (hi - value).max(value - lo).max(0.0) + 2.0 * EPS * value.abs();
        Self {
            value,
            abs_error: inflate(err),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "value": self.value, "abs_error": self.abs_error })
    }
}

impl fmt::Display for ApproxValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:e}", self.value, self.abs_error)
    }
}

impl Add for ApproxValue {
    type Output = ApproxValue;
    fn add(self, rhs: ApproxValue) -> ApproxValue {
        let value = self.value + rhs.value;
        let err = self.abs_error + rhs.abs_error + EPS * value.abs();
        ApproxValue {
            value,
            abs_error: inflate(err),
        }
    }
}

impl Sub for ApproxValue {
    type Output = ApproxValue;
    fn sub(self, rhs: ApproxValue) -> ApproxValue {
        let value = self.value - rhs.value;
        let err = self.abs_error + rhs.abs_error + EPS * value.abs();
        ApproxValue {
            value,
            abs_error: inflate(err),
        }
    }
}

impl Mul for ApproxValue {
    type Output = ApproxValue;
    fn mul(self, rhs: ApproxValue) -> ApproxValue {
        let value = self.value * rhs.value;
        let err = self.abs_error * rhs.value.abs()
            + rhs.abs_error * self.value.abs()
            + self.abs_error * rhs.abs_error
            + EPS * value.abs();
        ApproxValue {
            value,
            abs_error: inflate(err),
        }
    }
}

impl Div for ApproxValue {
    type Output = ApproxValue;
    fn div(self, rhs: ApproxValue) -> ApproxValue {
        let denom_low = rhs.value.abs() - rhs.abs_error;
        if !(denom_low > 0.0) {
            // Divisor interval touches zero: no finite bound exists.
            return ApproxValue {
                value: self.value / rhs.value,
                abs_error: f64::INFINITY,
            };
        }
        let value = self.value / rhs.value;
        let err = (self.abs_error + value.abs() * rhs.abs_error) / denom_low + EPS * value.abs();
        ApproxValue {
            value,
            abs_error: inflate(err),
        }
    }
}

impl Neg for ApproxValue {
    type Output = ApproxValue;
    fn neg(self) -> ApproxValue {
        ApproxValue {
            value: -self.value,
            abs_error: self.abs_error,
        }
    }
}

impl Zero for ApproxValue {
    fn zero() -> Self {
        ApproxValue::exact(0.0)
    }
    fn is_zero(&self) -> bool {
        self.value == 0.0 && self.abs_error == 0.0
    }
}

impl One for ApproxValue {
    fn one() -> Self {
        ApproxValue::exact(1.0)
    }
}
