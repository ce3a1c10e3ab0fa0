//! Exact multiplicative primitives on explicit integers and on factor
//! shapes too large to materialize.

use std::fmt;

use num::BigRational;

use crate::error::{Error, Result};
use crate::primes;
use crate::scalar::Scalar;

/// An integer represented as its prime factorization `prod p^e`. The empty
/// map is 1. Shapes can describe numbers (like a 10^7-prime product raised
/// to the 14th power) whose decimal expansion has a billion digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorShape {
    factors: Vec<(u64, u32)>, // ascending primes, exponents >= 1
}

impl FactorShape {
    pub fn one() -> Self {
        FactorShape {
            factors: Vec::new(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Build from `(prime, exponent)` pairs. Validates ascending order,
    /// positive exponents, and primality of every base.
    pub fn from_pairs(pairs: Vec<(u64, u32)>) -> Result<Self> {
        let mut prev = 0u64;
        for &(p, e) in &pairs {
            if p <= prev {
                return Err(Error::Domain(format!(
                    "factor primes must be strictly ascending (saw {p} after {prev})"
                )));
            }
            if e == 0 {
                return Err(Error::Domain(format!("exponent of {p} must be >= 1")));
            }
            if !is_prime(p) {
                return Err(Error::Domain(format!("{p} is not prime")));
            }
            prev = p;
        }
        Ok(FactorShape { factors: pairs })
    }

    /// Factor an explicit integer by trial division.
    pub fn factor(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("cannot factor 0".into()));
        }
        let mut factors = Vec::new();
        let mut m = n;
        let mut push = |p: u64, e: u32| {
            if e > 0 {
                factors.push((p, e));
            }
        };
        for p in [2u64, 3] {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            push(p, e);
        }
        let mut d = 5u64;
        while d * d <= m {
            for p in [d, d + 2] {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                push(p, e);
            }
            d += 6;
        }
        if m > 1 {
            push(m, 1);
        }
        Ok(FactorShape { factors })
    }

    /// Every prime of `table` with a uniform exponent. The table is trusted.
    pub fn uniform_over_primes(table: &primes::PrimeTable, exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::Domain("uniform exponent must be >= 1".into()));
        }
        Ok(FactorShape {
            factors: table.iter_u64().map(|p| (p, exponent)).collect(),
        })
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// Total number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| u64::from(e)).sum()
    }

    /// Largest squarefree divisor: every exponent set to 1.
    pub fn radical(&self) -> FactorShape {
        FactorShape {
            factors: self.factors.iter().map(|&(p, _)| (p, 1)).collect(),
        }
    }

    /// `n / rad(n)`: every exponent reduced by 1, primes with exponent 1
    /// dropping out.
    pub fn quotient_by_radical(&self) -> FactorShape {
        FactorShape {
            factors: self
                .factors
                .iter()
                .filter(|&&(_, e)| e > 1)
                .map(|&(p, e)| (p, e - 1))
                .collect(),
        }
    }

    /// Raise to the `m`-th power (all exponents multiplied by `m`).
    pub fn pow(&self, m: u32) -> Result<FactorShape> {
        if m == 0 {
            return Err(Error::Domain("power must be >= 1".into()));
        }
        let mut factors = Vec::with_capacity(self.factors.len());
        for &(p, e) in &self.factors {
            let me = e.checked_mul(m).ok_or_else(|| {
                Error::Overflow(format!("exponent {e} * {m} exceeds the exponent range"))
            })?;
            factors.push((p, me));
        }
        Ok(FactorShape { factors })
    }

    /// Materialize as a u64 when it fits.
    pub fn value(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                acc = acc.checked_mul(p)?;
            }
        }
        Some(acc)
    }

    /// `phi(n)/n = prod (1 - 1/p)` over the distinct primes, in the chosen
    /// scalar lane.
    pub fn phi_over_n<S: Scalar>(&self) -> S {
        self.factors
            .iter()
            .fold(S::one(), |acc, &(p, _)| acc * S::from_ratio(p - 1, p))
    }

    /// log10 of the represented integer (plain f64; used for size reports).
    pub fn log10(&self) -> f64 {
        self.factors
            .iter()
            .map(|&(p, e)| f64::from(e) * (p as f64).ln())
            .sum::<f64>()
            / std::f64::consts::LN_10
    }

    /// JSON form: array of `[prime, exponent]` pairs, ascending by prime.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.factors
                .iter()
                .map(|&(p, e)| serde_json::json!([p, e]))
                .collect(),
        )
    }
}

impl fmt::Display for FactorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(p, e) in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Trial-division primality test; explicit integers in this crate stay
/// within u64 and their prime factors within u32, so this is fast enough.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Number of prime factors of an explicit integer, with multiplicity.
/// `big_omega(1) = 0`.
pub fn big_omega(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("big_omega(0) is undefined".into()));
    }
    Ok(FactorShape::factor(n)?.big_omega())
}

/// Euler's totient of an explicit integer.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("euler_phi(0) is undefined".into()));
    }
    let shape = FactorShape::factor(n)?;
    let mut acc = n;
    for &(p, _) in shape.factors() {
        acc = acc / p * (p - 1);
    }
    Ok(acc)
}

/// `phi(n)/n` for a factor shape. The exact lane returns a big rational;
/// the float lane an error-bounded value. Large prime sets should prefer
/// the log-space route in the series module.
pub fn euler_phi_ratio<S: Scalar>(n: &FactorShape) -> S {
    n.phi_over_n()
}

/// Exact-rational `phi(n)/n`, for callers that do not want to name the lane.
pub fn euler_phi_ratio_exact(n: &FactorShape) -> BigRational {
    n.phi_over_n()
}

/// The least common multiple of `1..=x` as a factor shape: the exponent of
/// `p` is the largest `e` with `p^e <= x`, found by exact integer
/// exponentiation.
pub fn lcm_shape(x: u64) -> Result<FactorShape> {
    if x == 0 {
        return Err(Error::Domain("lcm over an empty range is undefined".into()));
    }
    let table = primes::sieve_upto(x)?;
    let mut factors = Vec::with_capacity(table.len());
    for p in table.iter_u64() {
        let mut e = 1u32;
        let mut pe = p;
        while let Some(next) = pe.checked_mul(p) {
            if next > x {
                break;
            }
            pe = next;
            e += 1;
        }
        factors.push((p, e));
    }
    Ok(FactorShape { factors })
}

/// A finite set of permitted omega values: a union of inclusive integer
/// intervals, normalized (clipped at 1, merged, ascending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaWindow {
    intervals: Vec<(u32, u32)>,
}

impl OmegaWindow {
    pub fn empty() -> Self {
        OmegaWindow {
            intervals: Vec::new(),
        }
    }

    /// Normalizing constructor: intervals are clipped to start at 1 (omega 0
    /// would admit the divisor 1, which no product-free divisor set can
    /// contain), empty intervals are dropped, overlaps and adjacencies merge.
    pub fn from_intervals(raw: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut clipped: Vec<(u32, u32)> = raw
            .into_iter()
            .filter_map(|(lo, hi)| {
                let lo = lo.max(1);
                (lo <= hi).then_some((lo, hi))
            })
            .collect();
        clipped.sort_unstable();
        let mut intervals: Vec<(u32, u32)> = Vec::with_capacity(clipped.len());
        for (lo, hi) in clipped {
            match intervals.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => intervals.push((lo, hi)),
            }
        }
        OmegaWindow { intervals }
    }

    pub fn single(lo: u32, hi: u32) -> Self {
        Self::from_intervals([(lo, hi)])
    }

    pub fn intervals(&self) -> &[(u32, u32)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, omega: u64) -> bool {
        self.intervals
            .iter()
            .any(|&(lo, hi)| u64::from(lo) <= omega && omega <= u64::from(hi))
    }

    pub fn min(&self) -> Option<u32> {
        self.intervals.first().map(|&(lo, _)| lo)
    }

    pub fn max(&self) -> Option<u32> {
        self.intervals.last().map(|&(_, hi)| hi)
    }

    pub fn values(&self) -> impl Iterator<Item = u32> + '_ {
        self.intervals.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    pub fn value_count(&self) -> u64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| u64::from(hi - lo) + 1)
            .sum()
    }

    /// Can some omega value in the window be reached from `omega` by adding
    /// at most `capacity` more prime factors?
    pub fn reachable_from(&self, omega: u64, capacity: u64) -> bool {
        self.intervals
            .iter()
            .any(|&(lo, hi)| omega <= u64::from(hi) && omega + capacity >= u64::from(lo))
    }

    /// Sum-freeness certificate: no `w1 + w2` (repetition allowed) may land
    /// back in the window. Because the sum of two integer intervals is again
    /// an interval, checking interval triples is exact. Returns a violating
    /// pair if one exists.
    pub fn sum_free_violation(&self) -> Option<(u32, u32)> {
        for (ai, &(alo, ahi)) in self.intervals.iter().enumerate() {
            for &(blo, bhi) in &self.intervals[ai..] {
                let sum_lo = alo + blo;
                let sum_hi = ahi + bhi;
                for &(klo, khi) in &self.intervals {
                    let lo = sum_lo.max(klo);
                    let hi = sum_hi.min(khi);
                    if lo <= hi {
                        // Recover a concrete pair with w1 + w2 = lo.
                        let w1 = alo.max(lo.saturating_sub(bhi));
                        let w2 = lo - w1;
                        return Some((w1, w2));
                    }
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.intervals
                .iter()
                .map(|&(lo, hi)| serde_json::json!([lo, hi]))
                .collect(),
        )
    }
}

impl fmt::Display for OmegaWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|&(lo, hi)| {
                if lo == hi {
                    format!("{lo}")
                } else {
                    format!("{lo}..{hi}")
                }
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Turn real bounds into an integer omega window. Strict mode keeps the
/// integers j with `lo < j < hi`; inclusive mode keeps `lo <= j <= hi`.
/// Anything below 1 is clipped away; an empty result is a legal value.
pub fn resolve_window(lo: f64, hi: f64, strict: bool) -> Result<OmegaWindow> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "window bounds must be finite, got ({lo}, {hi})"
        )));
    }
    if lo >= hi {
        return Err(Error::Domain(format!(
            "window bounds must satisfy lo < hi, got ({lo}, {hi})"
        )));
    }
    if lo.abs() > 1e9 || hi.abs() > 1e9 {
        return Err(Error::Domain(format!(
            "window bounds out of range: ({lo}, {hi})"
        )));
    }
    let (start, end) = if strict {
        (lo.floor() as i64 + 1, hi.ceil() as i64 - 1)
    } else {
        (lo.ceil() as i64, hi.floor() as i64)
    };
    let start = start.max(1);
    if end < start {
        return Ok(OmegaWindow::empty());
    }
    Ok(OmegaWindow::single(start as u32, end as u32))
}

/// The entropy-like function `Q(t) = t ln t - t + 1`, nonnegative on t > 0
/// with its only zero at t = 1.
pub fn entropy_q(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("entropy_q requires t > 0, got {t}")));
    }
    Ok(t * t.ln() - t + 1.0)
}

/// Every divisor `d` of the shape with `omega(d)` in the window,
/// materialized as explicit integers, ascending. `cap` guards against
/// combinatorial explosion; divisors that would leave u64 raise an
/// overflow error (but only when some divisor through that branch could
/// still reach the window).
pub fn divisors_with_omega(n: &FactorShape, w: &OmegaWindow, cap: usize) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    if w.is_empty() {
        return Ok(out);
    }
    let factors = n.factors();
    // remaining omega capacity from each position onward
    let mut suffix_cap = vec![0u64; factors.len() + 1];
    for i in (0..factors.len()).rev() {
        suffix_cap[i] = suffix_cap[i + 1] + u64::from(factors[i].1);
    }
    let w_max = u64::from(w.max().unwrap());

    fn walk(
        factors: &[(u64, u32)],
        suffix_cap: &[u64],
        w: &OmegaWindow,
        w_max: u64,
        cap: usize,
        idx: usize,
        omega: u64,
        product: u64,
        out: &mut Vec<u64>,
    ) -> Result<()> {
        if idx == factors.len() {
            if w.contains(omega) {
                if out.len() >= cap {
                    return Err(Error::Resource {
                        what: "qualifying divisor count",
                        needed: cap as u128 + 1,
                        budget: cap as u128,
                    });
                }
                out.push(product);
            }
            return Ok(());
        }
        let (p, e_max) = factors[idx];
        let mut value = Some(product);
        for e in 0..=u64::from(e_max) {
            let omega_e = omega + e;
            if omega_e > w_max {
                break;
            }
            if e > 0 {
                value = value.and_then(|v| v.checked_mul(p));
            }
            match value {
                Some(v) => walk(factors, suffix_cap, w, w_max, cap, idx + 1, omega_e, v, out)?,
                None => {
                    if w.reachable_from(omega_e, suffix_cap[idx + 1]) {
                        return Err(Error::Overflow(format!(
                            "a qualifying divisor of {n} exceeds the 64-bit range",
                            n = FactorShape {
                                factors: factors.to_vec()
                            },
                        )));
                    }
                    // No window value reachable through this branch; higher
                    // exponents only move omega further, but gaps in the
                    // window mean we must keep scanning them.
                }
            }
        }
        Ok(())
    }

    walk(factors, &suffix_cap, w, w_max, cap, 0, 0, 1, &mut out)?;
    out.sort_unstable();
    Ok(out)
}
