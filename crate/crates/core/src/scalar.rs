//! The scalar abstraction the symmetric-function machinery is generic over.
//!
//! Two lanes matter in practice: exact big rationals for small prime sets,
//! and [`ApproxValue`] (float plus certified bound) for large ones. Plain
//! `f64`/`f32` are provided for uncertified trend computations.

use std::ops::{Div, Sub};

use num::traits::{One, Pow, Zero};
use num::{BigInt, BigRational, ToPrimitive};

use crate::approx::{inflate, ApproxValue, EPS};
use crate::kahan;

pub trait Scalar: Clone + PartialEq + Zero + One + Sub<Output = Self> + Div<Output = Self> {
    /// Whether arithmetic in this lane is exact (no error accumulation).
    const IS_EXACT: bool;

    /// `numer / denom`, exact or outward-rounded. `denom` must be nonzero.
    fn from_ratio(numer: u64, denom: u64) -> Self;

    /// `1 / base^exp` for `base >= 2`, `exp >= 1`.
    fn recip_pow(base: u64, exp: u32) -> Self;

    /// `sum over p of 1/p^j` for every `j = 1..=j_max`; index 0 holds `j = 1`.
    fn prime_power_sums(primes: &[u32], j_max: u32) -> Vec<Self> {
        (1..=j_max)
            .map(|j| {
                primes.iter().fold(Self::zero(), |acc, &p| {
                    acc + Self::recip_pow(u64::from(p), j)
                })
            })
            .collect()
    }

    fn to_f64_lossy(&self) -> f64;

    fn mode_name() -> &'static str {
        if Self::IS_EXACT {
            "exact"
        } else {
            "float"
        }
    }
}

/// Rendering of one scalar as a JSON table entry.
pub trait JsonScalar {
    fn json_entry(&self) -> serde_json::Value;
}

impl Scalar for f64 {
    const IS_EXACT: bool = false;

    fn from_ratio(numer: u64, denom: u64) -> Self {
        numer as f64 / denom as f64
    }

    fn recip_pow(base: u64, exp: u32) -> Self {
        let r = 1.0 / base as f64;
        let mut x = r;
        for _ in 1..exp {
            x *= r;
        }
        x
    }

    fn prime_power_sums(primes: &[u32], j_max: u32) -> Vec<Self> {
        kahan::chunked_power_sums(primes, j_max)
            .into_iter()
            .map(|acc| acc.value())
            .collect()
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const IS_EXACT: bool = false;

    fn from_ratio(numer: u64, denom: u64) -> Self {
        numer as f32 / denom as f32
    }

    fn recip_pow(base: u64, exp: u32) -> Self {
        let r = 1.0 / base as f32;
        let mut x = r;
        for _ in 1..exp {
            x *= r;
        }
        x
    }

    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for ApproxValue {
    const IS_EXACT: bool = false;

    fn from_ratio(numer: u64, denom: u64) -> Self {
        let value = numer as f64 / denom as f64;
        if denom == 1 && numer < (1 << 53) {
            ApproxValue::exact(value)
        } else {
            ApproxValue::with_error(value, inflate(EPS * value.abs()))
        }
    }

    fn recip_pow(base: u64, exp: u32) -> Self {
        let r = 1.0 / base as f64;
        let mut x = r;
        for _ in 1..exp {
            x *= r;
        }
        // One rounding for the division plus exp-1 multiplications.
        ApproxValue::with_error(x, inflate(x * EPS * f64::from(exp + 1)))
    }

    fn prime_power_sums(primes: &[u32], j_max: u32) -> Vec<Self> {
        kahan::chunked_power_sums(primes, j_max)
            .into_iter()
            .enumerate()
            .map(|(idx, acc)| {
                let j = idx as f64 + 1.0;
                // Per-term formation error <= 1.01*j*EPS*|term| plus two
                // levels of Neumaier combination, each <= 1.01*EPS*abs_sum.
                let err = EPS * acc.abs_sum() * (j + 6.0);
                ApproxValue::with_error(acc.value(), inflate(err))
            })
            .collect()
    }

    fn to_f64_lossy(&self) -> f64 {
        self.value()
    }
}

impl Scalar for BigRational {
    const IS_EXACT: bool = true;

    fn from_ratio(numer: u64, denom: u64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn recip_pow(base: u64, exp: u32) -> Self {
        BigRational::new(BigInt::one(), Pow::pow(BigInt::from(base), exp))
    }

    /// Common-denominator evaluation: with `Q = prod p`, the sum for
    /// exponent `j` is `sum(Q^j / p^j) / Q^j`. This performs one gcd per
    /// exponent instead of one per term.
    fn prime_power_sums(primes: &[u32], j_max: u32) -> Vec<Self> {
        if primes.is_empty() {
            return vec![BigRational::zero(); j_max as usize];
        }
        let q: BigInt = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
        (1..=j_max)
            .map(|j| {
                let den: BigInt = Pow::pow(q.clone(), j);
                let num: BigInt = primes
                    .iter()
                    .map(|&p| &den / Pow::pow(BigInt::from(p), j))
                    .sum();
                BigRational::new(num, den)
            })
            .collect()
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl JsonScalar for f64 {
    fn json_entry(&self) -> serde_json::Value {
        serde_json::json!({ "value": self })
    }
}

impl JsonScalar for f32 {
    fn json_entry(&self) -> serde_json::Value {
        serde_json::json!({ "value": self })
    }
}

impl JsonScalar for ApproxValue {
    fn json_entry(&self) -> serde_json::Value {
        self.to_json()
    }
}

impl JsonScalar for BigRational {
    fn json_entry(&self) -> serde_json::Value {
        serde_json::json!({
            "num": self.numer().to_string(),
            "den": self.denom().to_string(),
        })
    }
}
