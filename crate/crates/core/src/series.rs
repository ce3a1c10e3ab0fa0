//! Symmetric-function machinery over prime reciprocals.
//!
//! For a finite prime set P, the power sums are `sigma_j = sum 1/p^j`. From
//! them the complete homogeneous sums `S_j` (all monomials of degree j in
//! the reciprocals, i.e. `sum 1/m` over m with rad(m) | prod P and
//! omega(m) = j) follow from the recurrence
//!
//! ```text
//!     S_k = (1/k) * sum_{j=1..k} sigma_j * S_{k-j},    S_0 = 1,
//! ```
//!
//! and the elementary symmetric sums `e_j` (squarefree m only) from
//! Newton's identities with alternating signs. Bounded-exponent sums come
//! from a truncated polynomial-product DP. Everything is generic over the
//! scalar lane: exact rationals for small P, certified floats for large P.

use crate::approx::{inflate, ApproxValue, EPS};
use crate::arith::OmegaWindow;
use crate::error::{Error, Result};
use crate::kahan;
use crate::primes::{PrimeTable, Provenance};
use crate::scalar::{JsonScalar, Scalar};

/// Which family a [`SymSums`] table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumsKind {
    /// Power sums `sigma_j`, defined for j >= 1.
    Sigma,
    /// Complete homogeneous sums `S_j`, with `S_0 = 1`.
    Complete,
    /// Elementary symmetric sums `e_j`, with `e_0 = 1`.
    Elementary,
    /// Exponent-capped sums `T_j`, with `T_0 = 1`.
    Capped,
}

impl SumsKind {
    pub fn name(self) -> &'static str {
        match self {
            SumsKind::Sigma => "sigma",
            SumsKind::Complete => "complete",
            SumsKind::Elementary => "elementary",
            SumsKind::Capped => "capped",
        }
    }
}

/// A table of symmetric-function values indexed by j. Sigma tables start at
/// j = 1; the other kinds start at j = 0 with value 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SymSums<S> {
    kind: SumsKind,
    provenance: Provenance,
    prime_count: u64,
    j_min: u32,
    values: Vec<S>,
}

impl<S: Scalar> SymSums<S> {
    fn new(
        kind: SumsKind,
        provenance: Provenance,
        prime_count: u64,
        j_min: u32,
        values: Vec<S>,
    ) -> Self {
        SymSums {
            kind,
            provenance,
            prime_count,
            j_min,
            values,
        }
    }

    pub fn kind(&self) -> SumsKind {
        self.kind
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn prime_count(&self) -> u64 {
        self.prime_count
    }

    pub fn j_min(&self) -> u32 {
        self.j_min
    }

    pub fn j_max(&self) -> u32 {
        self.j_min + self.values.len() as u32 - 1
    }

    pub fn get(&self, j: u32) -> Option<&S> {
        j.checked_sub(self.j_min)
            .and_then(|idx| self.values.get(idx as usize))
    }

    /// Value at index j; panics outside `j_min..=j_max`.
    pub fn value(&self, j: u32) -> &S {
        self.get(j)
            .unwrap_or_else(|| panic!("index {j} outside {}..={}", self.j_min, self.j_max()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &S)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.j_min + i as u32, v))
    }
}

impl<S: Scalar + JsonScalar> SymSums<S> {
    pub fn to_json(&self) -> serde_json::Value {
        let values: Vec<serde_json::Value> = self
            .iter()
            .map(|(j, v)| {
                let mut entry = v.json_entry();
                entry["j"] = serde_json::json!(j);
                entry
            })
            .collect();
        serde_json::json!({
            "kind": self.kind.name(),
            "prime_provenance": self.provenance.to_json(),
            "prime_count": self.prime_count,
            "mode": S::mode_name(),
            "j_max": self.j_max(),
            "values": values,
        })
    }
}

/// Default cap on the prime-set size for exact-rational evaluation; beyond
/// it the rationals' denominators make exact mode impractical.
pub const DEFAULT_EXACT_PRIME_LIMIT: usize = 1000;

/// Hard cap on the truncation degree of the capped-sums DP.
pub const MAX_CAPPED_DEGREE: u32 = 64;

fn check_exact_budget<S: Scalar>(len: usize, limit: usize) -> Result<()> {
    if S::IS_EXACT && len > limit {
        return Err(Error::Resource {
            what: "exact-mode prime set",
            needed: len as u128,
            budget: limit as u128,
        });
    }
    Ok(())
}

/// Power sums `sigma_1..=sigma_j_max` over the table's primes.
pub fn power_sums<S: Scalar>(primes: &PrimeTable, j_max: u32) -> Result<SymSums<S>> {
    power_sums_with_limit(primes, j_max, DEFAULT_EXACT_PRIME_LIMIT)
}

pub fn power_sums_with_limit<S: Scalar>(
    primes: &PrimeTable,
    j_max: u32,
    exact_prime_limit: usize,
) -> Result<SymSums<S>> {
    if j_max < 1 {
        return Err(Error::Domain("power sums need j_max >= 1".into()));
    }
    check_exact_budget::<S>(primes.len(), exact_prime_limit)?;
    Ok(power_sums_slice(
        primes.primes(),
        primes.provenance(),
        j_max,
    ))
}

/// Sigma table over a raw prime slice (used internally when a table is
/// partitioned, e.g. around an exponent split point).
pub(crate) fn power_sums_slice<S: Scalar>(
    primes: &[u32],
    provenance: Provenance,
    j_max: u32,
) -> SymSums<S> {
    SymSums::new(
        SumsKind::Sigma,
        provenance,
        primes.len() as u64,
        1,
        S::prime_power_sums(primes, j_max),
    )
}

/// Complete homogeneous sums from a sigma table via the S_0 = 1 recurrence.
pub fn complete_homogeneous<S: Scalar>(sigma: &SymSums<S>) -> Result<SymSums<S>> {
    if sigma.kind != SumsKind::Sigma {
        return Err(Error::Domain(format!(
            "complete_homogeneous expects a sigma table, got {}",
            sigma.kind.name()
        )));
    }
    let j_max = sigma.j_max();
    let mut s: Vec<S> = Vec::with_capacity(j_max as usize + 1);
    s.push(S::one());
    for k in 1..=j_max {
        let mut acc = S::zero();
        for j in 1..=k {
            acc = acc + sigma.value(j).clone() * s[(k - j) as usize].clone();
        }
        s.push(acc / S::from_ratio(u64::from(k), 1));
    }
    Ok(SymSums::new(
        SumsKind::Complete,
        sigma.provenance,
        sigma.prime_count,
        0,
        s,
    ))
}

/// Elementary symmetric sums from a sigma table via Newton's identities:
/// `e_k = (1/k) sum_{j=1..k} (-1)^(j-1) sigma_j e_{k-j}`.
pub fn elementary_symmetric<S: Scalar>(sigma: &SymSums<S>) -> Result<SymSums<S>> {
    if sigma.kind != SumsKind::Sigma {
        return Err(Error::Domain(format!(
            "elementary_symmetric expects a sigma table, got {}",
            sigma.kind.name()
        )));
    }
    let j_max = sigma.j_max();
    let mut e: Vec<S> = Vec::with_capacity(j_max as usize + 1);
    e.push(S::one());
    for k in 1..=j_max {
        let mut acc = S::zero();
        for j in 1..=k {
            let term = sigma.value(j).clone() * e[(k - j) as usize].clone();
            if j % 2 == 1 {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
        }
        e.push(acc / S::from_ratio(u64::from(k), 1));
    }
    Ok(SymSums::new(
        SumsKind::Elementary,
        sigma.provenance,
        sigma.prime_count,
        0,
        e,
    ))
}

/// Per-prime exponent caps for [`capped_sums`].
#[derive(Clone, Copy, Debug)]
pub enum ExponentCaps<'a> {
    Uniform(u32),
    /// One cap per prime, aligned with the table's order.
    PerPrime(&'a [u32]),
}

/// Core DP shared by `capped_sums` and the density computations: the
/// coefficient of t^j in `prod_p (1 + (t/p) + ... + (t/p)^cap(p))`,
/// truncated at degree `j_max`. Index j of the result holds T_j (T_0 = 1).
pub(crate) fn capped_dp<S, I>(pairs: I, j_max: u32) -> Vec<S>
where
    S: Scalar,
    I: IntoIterator<Item = (u64, u32)>,
{
    let deg = j_max as usize;
    let mut coeff: Vec<S> = vec![S::zero(); deg + 1];
    coeff[0] = S::one();
    let mut next: Vec<S> = vec![S::zero(); deg + 1];
    for (p, cap) in pairs {
        let reach = cap.min(j_max) as usize;
        if reach == 0 {
            continue;
        }
        // powers[e] = 1/p^(e+1)
        let mut powers: Vec<S> = Vec::with_capacity(reach);
        for e in 1..=reach as u32 {
            powers.push(S::recip_pow(p, e));
        }
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = coeff[i].clone();
            for e in 1..=reach.min(i) {
                acc = acc + powers[e - 1].clone() * coeff[i - e].clone();
            }
            *slot = acc;
        }
        std::mem::swap(&mut coeff, &mut next);
    }
    coeff
}

/// Exponent-capped reciprocal sums `T_j`: the sum of 1/d over integers d
/// whose prime support lies in the table, with the exponent of each p at
/// most cap(p), and omega(d) = j.
pub fn capped_sums<S: Scalar>(
    primes: &PrimeTable,
    caps: ExponentCaps<'_>,
    j_max: u32,
) -> Result<SymSums<S>> {
    if j_max < 1 {
        return Err(Error::Domain("capped sums need j_max >= 1".into()));
    }
    if j_max > MAX_CAPPED_DEGREE {
        return Err(Error::Domain(format!(
            "capped sums truncation degree {j_max} exceeds the {MAX_CAPPED_DEGREE} cap"
        )));
    }
    let values = match caps {
        ExponentCaps::Uniform(cap) => {
            if cap < 1 {
                return Err(Error::Domain("exponent caps must be >= 1".into()));
            }
            capped_dp(primes.iter_u64().map(|p| (p, cap)), j_max)
        }
        ExponentCaps::PerPrime(caps) => {
            if caps.len() != primes.len() {
                return Err(Error::Domain(format!(
                    "got {} caps for {} primes",
                    caps.len(),
                    primes.len()
                )));
            }
            if caps.iter().any(|&c| c < 1) {
                return Err(Error::Domain("exponent caps must be >= 1".into()));
            }
            capped_dp(primes.iter_u64().zip(caps.iter().copied()), j_max)
        }
    };
    Ok(SymSums::new(
        SumsKind::Capped,
        primes.provenance(),
        primes.len() as u64,
        0,
        values,
    ))
}

/// The finite Euler product `prod_p (1 - z/p)^(-1)` over the table, with a
/// certified bound. Requires `0 < z < 2` (and z below the smallest prime,
/// which holds automatically since tables start at 2).
pub fn euler_product(primes: &PrimeTable, z: f64) -> Result<ApproxValue> {
    if !(z > 0.0 && z < 2.0) {
        return Err(Error::Domain(format!(
            "euler_product needs 0 < z < 2, got {z}"
        )));
    }
    if let Some(&p0) = primes.primes().first() {
        if z >= f64::from(p0) {
            return Err(Error::Domain(format!(
                "euler_product needs z below the smallest prime {p0}, got {z}"
            )));
        }
    }
    let mut prod = 1.0f64;
    let mut rel = 0.0f64;
    for p in primes.iter_u64() {
        let q = z / p as f64;
        let t = 1.0 - q;
        // one rounding for z/p, one for 1 - q (amplified by cancellation),
        // one for the running multiply
        rel += EPS * (1.0 + q / t) + EPS;
        prod *= t;
    }
    let value = 1.0 / prod;
    rel += EPS;
    Ok(ApproxValue::with_error(value, inflate(value.abs() * rel)))
}

/// `sum_p log(1 - 1/p)`, i.e. `log(phi(N)/N)` for N supported on the table,
/// with a certified bound. Evaluated two independent ways: a direct
/// compensated sum of `log1p(-1/p)`, and the sigma-corrected series
/// `-sigma_1 - sigma_2/2 + sum_p (1/p + 1/(2p^2) + log(1 - 1/p))` whose
/// correction terms shrink like p^-3. The two must agree within combined
/// bounds; the direct value is returned.
pub fn phi_ratio_log(primes: &PrimeTable) -> Result<ApproxValue> {
    if primes.is_empty() {
        return Err(Error::Domain(
            "phi_ratio_log needs a nonempty prime set".into(),
        ));
    }
    let direct = {
        let acc = kahan::chunked_sum(primes.primes(), |p| (-1.0 / p as f64).ln_1p());
        // |term| >= 1/p, so per-term formation error (2 ulp for the division
        // inside ln_1p's argument, 2 ulp for ln_1p itself, with the argument
        // error amplified by at most 1/(1-1/p) <= 2) stays below 6 EPS |term|;
        // two Neumaier levels add 2 EPS more.
        let err = EPS * acc.abs_sum() * 8.0;
        ApproxValue::with_error(acc.value(), inflate(err))
    };

    let series = {
        let sigma: SymSums<ApproxValue> = power_sums(primes, 2)?;
        let correction = {
            let acc = kahan::chunked_sum(primes.primes(), |p| {
                let r = 1.0 / p as f64;
                r + 0.5 * r * r + (-r).ln_1p()
            });
            // Individual terms cancel almost completely (the true term is
            // O(p^-3)), so the certificate leans on the absolute errors of
            // the three summands, each below 10 EPS / p; sigma_1 bounds
            // sum_p 1/p.
            let scale = sigma.value(1).upper_bound();
            let err = EPS * (12.0 * scale + 2.0 * acc.abs_sum());
            ApproxValue::with_error(acc.value(), inflate(err))
        };
        let half = ApproxValue::exact(0.5);
        correction - *sigma.value(1) - half * *sigma.value(2)
    };

    let gap = (direct.value() - series.value()).abs();
    let allowed = direct.abs_error() + series.abs_error();
    if gap > allowed {
        return Err(Error::Inconsistency(format!(
            "phi_ratio_log routes disagree: direct {} vs series {} (gap {gap:e} > bound {allowed:e})",
            direct.value(),
            series.value()
        )));
    }
    Ok(direct)
}

/// Aggregate `sum_{j in w} S_j` (uncapped) or `T_j` (capped). An empty
/// window yields zero.
pub fn restricted_reciprocal_sum<S: Scalar>(
    primes: &PrimeTable,
    w: &OmegaWindow,
    caps: Option<ExponentCaps<'_>>,
) -> Result<S> {
    let Some(w_max) = w.max() else {
        return Ok(S::zero());
    };
    let table: SymSums<S> = match caps {
        None => complete_homogeneous(&power_sums::<S>(primes, w_max)?)?,
        Some(caps) => capped_sums(primes, caps, w_max)?,
    };
    Ok(w.values()
        .fold(S::zero(), |acc, j| acc + table.value(j).clone()))
}
