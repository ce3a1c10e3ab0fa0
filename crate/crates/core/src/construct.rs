//! Construction of product-free objects: divisor-window sets and their
//! residue lifts, the asymptotic window instances, the large numerical
//! reproduction, quadratic-nonresidue sets, and the density lower-bound
//! formula.
//!
//! The central device: if D is a product-free set of divisors of
//! `n / rad(n)`, then `{s in Z/nZ : gcd(s, n) in D}` is product-free with
//! exactly `phi(n) * sum_{d in D} 1/d` elements. When D is defined by an
//! omega window, product-freeness of D reduces to the window's
//! sum-freeness certificate, which stays checkable even when D itself is
//! astronomically large.

use std::collections::HashSet;
use std::f64::consts::{E, LN_10, LN_2};
use std::fmt;

use num::integer::gcd;

use crate::approx::ApproxValue;
use crate::arith::{self, FactorShape, OmegaWindow};
use crate::error::{Error, Result};
use crate::kahan;
use crate::primes::PrimeTable;
use crate::scalar::{JsonScalar, Scalar};
use crate::series::{self, SymSums};
use crate::verify;

/// Default ceiling on explicit moduli (bit-vector residue sets).
pub const DEFAULT_MODULUS_LIMIT: u64 = 10_000_000;

/// Default ceiling on materialized divisor lists.
pub const DEFAULT_DIVISOR_CAP: usize = 1 << 20;

/// A dense subset of Z/nZ for explicit small n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSet {
    modulus: u64,
    words: Vec<u64>,
    count: u64,
}

impl ResidueSet {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Domain("residue sets need modulus >= 1".into()));
        }
        let words = vec![0u64; (modulus as usize).div_ceil(64)];
        Ok(ResidueSet {
            modulus,
            words,
            count: 0,
        })
    }

    pub fn from_members(modulus: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut set = Self::new(modulus)?;
        for r in members {
            if r >= modulus {
                return Err(Error::Domain(format!(
                    "residue {r} out of range for modulus {modulus}"
                )));
            }
            set.insert(r);
        }
        Ok(set)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn insert(&mut self, r: u64) {
        assert!(r < self.modulus, "residue {r} out of range");
        let word = &mut self.words[(r / 64) as usize];
        let bit = 1u64 << (r % 64);
        if *word & bit == 0 {
            *word |= bit;
            self.count += 1;
        }
    }

    pub fn contains(&self, r: u64) -> bool {
        debug_assert!(r < self.modulus);
        self.words[(r / 64) as usize] & (1u64 << (r % 64)) != 0
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.modulus).filter(move |&r| self.contains(r))
    }

    pub fn members(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// Integers in `[1, x]` congruent to a member modulo n.
    pub fn lift_upto(&self, x: u64) -> Vec<u64> {
        (1..=x)
            .filter(|&m| self.contains(m % self.modulus))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "modulus": self.modulus,
            "size": self.count,
            "members": self.members(),
        })
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{} residues mod {}}}", self.count, self.modulus)
    }
}

/// A set of divisors of `n / rad(n)` selected by an omega window, kept
/// symbolic until materialized.
#[derive(Clone, Debug)]
pub struct DivisorClassSet {
    modulus: FactorShape,
    window: OmegaWindow,
    explicit: Option<Vec<u64>>,
}

impl DivisorClassSet {
    pub fn modulus(&self) -> &FactorShape {
        &self.modulus
    }

    pub fn window(&self) -> &OmegaWindow {
        &self.window
    }

    pub fn explicit(&self) -> Option<&[u64]> {
        self.explicit.as_deref()
    }

    /// Materialize the divisors (ascending) if their count fits `cap`.
    pub fn materialize(&mut self, cap: usize) -> Result<&[u64]> {
        if self.explicit.is_none() {
            let divisors =
                arith::divisors_with_omega(&self.modulus.quotient_by_radical(), &self.window, cap)?;
            self.explicit = Some(divisors);
        }
        Ok(self.explicit.as_deref().unwrap())
    }

    /// Lift to residues modulo the materialized value of n.
    pub fn lift(&mut self) -> Result<ResidueSet> {
        let n = self.modulus.value().ok_or_else(|| {
            Error::Overflow("modulus does not fit in 64 bits; cannot lift explicitly".into())
        })?;
        self.materialize(DEFAULT_DIVISOR_CAP)?;
        lift_to_residues(self.explicit.as_deref().unwrap(), n)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "modulus": self.modulus.to_json(),
            "window": self.window.to_json(),
            "divisors": self.explicit.as_ref().map(|d| serde_json::json!(d)),
        })
    }
}

/// Validate a window against a modulus shape and certify sum-freeness.
///
/// Requirements: the window is nonempty after normalization; every window
/// value is reachable by a divisor of `n / rad(n)`; and the window is
/// sum-free (no `w1 + w2` back in the window), which certifies integer
/// product-freeness of the divisor set.
pub fn divisor_window_set(n: &FactorShape, w: &OmegaWindow) -> Result<DivisorClassSet> {
    if w.is_empty() {
        return Err(Error::Domain(
            "divisor window is empty after clipping".into(),
        ));
    }
    let capacity = n.quotient_by_radical().big_omega();
    let w_max = u64::from(w.max().unwrap());
    if w_max > capacity {
        return Err(Error::Domain(format!(
            "window value {w_max} exceeds omega(n/rad(n)) = {capacity}; no divisor can reach it"
        )));
    }
    if let Some((w1, w2)) = w.sum_free_violation() {
        return Err(Error::WindowNotSumFree {
            w1,
            w2,
            sum: w1 + w2,
        });
    }
    Ok(DivisorClassSet {
        modulus: n.clone(),
        window: w.clone(),
        explicit: None,
    })
}

/// Lift an explicit product-free divisor set to `{s : gcd(s, n) in D}`.
/// The cardinality is verified against the exact formula
/// `phi(n) * sum 1/d` before returning.
pub fn lift_to_residues(divisors: &[u64], modulus: u64) -> Result<ResidueSet> {
    lift_to_residues_with_limit(divisors, modulus, DEFAULT_MODULUS_LIMIT)
}

pub fn lift_to_residues_with_limit(
    divisors: &[u64],
    modulus: u64,
    limit: u64,
) -> Result<ResidueSet> {
    if modulus == 0 {
        return Err(Error::Domain("modulus must be >= 1".into()));
    }
    if modulus > limit {
        return Err(Error::Resource {
            what: "explicit modulus",
            needed: u128::from(modulus),
            budget: u128::from(limit),
        });
    }
    let shape = FactorShape::factor(modulus)?;
    let core = shape.quotient_by_radical().value().expect("divides n");
    for &d in divisors {
        if d == 0 || core % d != 0 {
            return Err(Error::Precondition(format!(
                "divisor {d} does not divide n/rad(n) = {core} (n = {modulus})"
            )));
        }
    }
    match verify::is_product_free_integers(divisors)? {
        verify::Verdict::Pass => {}
        verify::Verdict::Fail(cex) => {
            return Err(Error::Precondition(format!(
                "divisor set is not product-free: {cex}"
            )));
        }
    }

    let member_divisors: HashSet<u64> = divisors.iter().copied().collect();
    let mut set = ResidueSet::new(modulus)?;
    for s in 0..modulus {
        if member_divisors.contains(&gcd(s, modulus)) {
            set.insert(s);
        }
    }

    // |S_D| = sum phi(n)/d, an exact integer because d | n/rad(n) forces
    // phi(n/d) = phi(n)/d.
    let phi = arith::euler_phi(modulus)?;
    let expected: u64 = divisors.iter().map(|&d| phi / d).sum();
    if set.len() != expected {
        return Err(Error::Inconsistency(format!(
            "lift of {divisors:?} mod {modulus} has {} members; the divisor formula gives {expected}",
            set.len()
        )));
    }
    Ok(set)
}

/// Density `phi(n)/n * sum_{j in w} T_j` of the window set modulo n, where
/// the T_j are exponent-capped sums with cap(p) = e_p - 1 (so that the
/// counted divisors divide n/rad(n)).
pub fn density_of_window_set<S: Scalar>(
    n: &FactorShape,
    w: &OmegaWindow,
    primes: &PrimeTable,
) -> Result<S> {
    for p in n.distinct_primes() {
        let covered =
            p <= u64::from(u32::MAX) && primes.primes().binary_search(&(p as u32)).is_ok();
        if !covered {
            return Err(Error::Domain(format!(
                "prime {p} of the modulus is missing from the prime table"
            )));
        }
    }
    let Some(w_max) = w.max() else {
        return Ok(S::zero());
    };
    if u64::from(w_max) > u64::from(series::MAX_CAPPED_DEGREE) {
        return Err(Error::Domain(format!(
            "window reaches degree {w_max}, beyond the {} DP cap",
            series::MAX_CAPPED_DEGREE
        )));
    }
    let pairs = n
        .factors()
        .iter()
        .filter(|&&(_, e)| e >= 2)
        .map(|&(p, e)| (p, e - 1));
    let t: Vec<S> = series::capped_dp(pairs, w_max);
    let sum = w
        .values()
        .fold(S::zero(), |acc, j| acc + t[j as usize].clone());
    Ok(n.phi_over_n::<S>() * sum)
}

/// One instance of the window construction: modulus `lcm(1..=x)^m`, window
/// resolved from real bounds, density, and (for the general variant) the
/// certified (k, j) exponent pairs.
#[derive(Clone, Debug)]
pub struct TheoremInstance<S> {
    pub x: u64,
    pub m: u32,
    pub n: FactorShape,
    pub window: OmegaWindow,
    pub density: S,
    pub degenerate: bool,
    pub pairs: Vec<(u32, u32)>,
}

impl<S: Scalar + JsonScalar> TheoremInstance<S> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "x": self.x,
            "m": self.m,
            "n": self.n.to_json(),
            "log10_n": self.n.log10(),
            "window": self.window.to_json(),
            "density": self.density.json_entry(),
            "degenerate": self.degenerate,
            "pairs": self.pairs,
        })
    }
}

fn instance_window(x: u64, lo_factor: f64, hi_factor: f64) -> Result<OmegaWindow> {
    let loglog = (x as f64).ln().ln();
    arith::resolve_window(lo_factor * loglog, hi_factor * loglog, true)
}

fn check_prime_coverage(x: u64, primes: &PrimeTable) -> Result<()> {
    if primes.covered_limit() < x {
        return Err(Error::Domain(format!(
            "prime table covers only up to {}, need all primes <= {x}",
            primes.covered_limit()
        )));
    }
    Ok(())
}

/// The plain product-free instance: `n = lcm(1..=x)^2` with the strict
/// window `(e/4 * loglog x, e/2 * loglog x)`. Small x legitimately yields
/// an empty window; the instance is then flagged degenerate with density 0.
pub fn theorem_main_instance<S: Scalar>(x: u64, primes: &PrimeTable) -> Result<TheoremInstance<S>> {
    if x < 3 {
        return Err(Error::Domain(format!("instance needs x >= 3, got {x}")));
    }
    check_prime_coverage(x, primes)?;
    let window = instance_window(x, E / 4.0, E / 2.0)?;
    let n = arith::lcm_shape(x)?.pow(2)?;
    let (density, degenerate) = if window.is_empty() {
        (S::zero(), true)
    } else {
        (density_of_window_set(&n, &window, primes)?, false)
    };
    Ok(TheoremInstance {
        x,
        m: 2,
        n,
        window,
        density,
        degenerate,
        pairs: Vec::new(),
    })
}

/// The simultaneous (k, j) instance: `n = lcm(1..=x)^m` with the strict
/// window `((1 - 1/m) loglog x, (1 + 1/m) loglog x)`. Every returned pair
/// (k > j, k + j <= m) is certified twice: on the real bounds via
/// `k (1 - 1/m) >= j (1 + 1/m)`, and on the resolved integer window via
/// `k * min > j * max`.
pub fn theorem_general_instance<S: Scalar>(
    x: u64,
    m: u32,
    primes: &PrimeTable,
) -> Result<TheoremInstance<S>> {
    if x < 3 {
        return Err(Error::Domain(format!("instance needs x >= 3, got {x}")));
    }
    if m < 3 {
        return Err(Error::Domain(format!("instance needs m >= 3, got {m}")));
    }
    check_prime_coverage(x, primes)?;
    let mf = f64::from(m);
    let window = instance_window(x, 1.0 - 1.0 / mf, 1.0 + 1.0 / mf)?;
    let n = arith::lcm_shape(x)?.pow(m)?;

    let mut pairs = Vec::new();
    for k in 2..=m {
        for j in 1..k {
            if k + j > m {
                break;
            }
            // real-bound certificate, exact in integers
            let real_ok = u64::from(k) * u64::from(m - 1) >= u64::from(j) * u64::from(m + 1);
            // resolved-window disjointness
            let resolved_ok = match (window.min(), window.max()) {
                (Some(lo), Some(hi)) => u64::from(k) * u64::from(lo) > u64::from(j) * u64::from(hi),
                _ => true, // empty window: vacuous
            };
            if !real_ok || !resolved_ok {
                return Err(Error::Inconsistency(format!(
                    "pair ({k},{j}) fails its window certificate for m = {m}, x = {x}"
                )));
            }
            pairs.push((k, j));
        }
    }

    let (density, degenerate) = if window.is_empty() {
        (S::zero(), true)
    } else {
        (density_of_window_set(&n, &window, primes)?, false)
    };
    Ok(TheoremInstance {
        x,
        m,
        n,
        window,
        density,
        degenerate,
        pairs,
    })
}

/// Which modulus the large reproduction targets: the full 14th-power
/// product, or the variant with exponents dropped to 2 above 10^6.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    N,
    NPrime,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::N => "N",
            Variant::NPrime => "Nprime",
        }
    }

    /// The density bound the reproduction must certify.
    pub fn reproduction_threshold(self) -> f64 {
        match self {
            Variant::N => 0.5004,
            Variant::NPrime => 0.5003,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" | "n" => Ok(Variant::N),
            "Nprime" | "nprime" | "NPrime" | "N'" => Ok(Variant::NPrime),
            other => Err(Error::Domain(format!("unknown variant {other:?}"))),
        }
    }
}

/// Prime count that makes a run a faithful reproduction.
pub const REPRODUCTION_PRIME_COUNT: u64 = 10_000_000;

/// Exponents drop from 14 to 2 for primes above this bound in the NPrime
/// variant.
pub const NPRIME_SPLIT: u64 = 1_000_000;

/// Uniform exponent of the reproduction modulus.
pub const MODULUS_EXPONENT: u32 = 14;

/// The omega window of the reproduction: {3..5} union {11..13}.
pub fn reproduction_window() -> OmegaWindow {
    OmegaWindow::from_intervals([(3, 5), (11, 13)])
}

/// Full report of the large numerical example.
#[derive(Clone, Debug)]
pub struct ExampleReport {
    pub variant: Variant,
    pub prime_count: u64,
    /// True when the run used exactly the canonical prime count.
    pub reproduction: bool,
    pub window: OmegaWindow,
    pub sigma: SymSums<ApproxValue>,
    pub s: SymSums<ApproxValue>,
    pub phi_ratio: ApproxValue,
    pub window_sum: ApproxValue,
    pub density_bound: ApproxValue,
    /// `density_bound.value - density_bound.abs_error`: the certified lower
    /// bound this run establishes.
    pub certified_lower: f64,
    /// log10 of the modulus this variant talks about.
    pub digits_estimate: f64,
}

impl ExampleReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "variant": self.variant.name(),
            "prime_count": self.prime_count,
            "reproduction": self.reproduction,
            "window": self.window.to_json(),
            "sigma": self.sigma.to_json(),
            "s": self.s.to_json(),
            "phi_ratio": self.phi_ratio.to_json(),
            "window_sum": self.window_sum.to_json(),
            "density_bound": self.density_bound.to_json(),
            "certified_lower": self.certified_lower,
            "digits_estimate": self.digits_estimate,
        })
    }

    /// The two 13-row tables side by side, plus the summary quantities.
    pub fn render_table(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "variant {}  ({} primes{})",
            self.variant.name(),
            self.prime_count,
            if self.reproduction {
                ""
            } else {
                ", non-reproduction size"
            }
        );
        let _ = writeln!(out, "{:>4} {:>13} {:>13}", "j", "sigma_j", "S_j");
        for j in 1..=self.sigma.j_max() {
            let _ = writeln!(
                out,
                "{:>4} {:>13.6} {:>13.6}",
                j,
                self.sigma.value(j).value(),
                self.s.value(j).value()
            );
        }
        let _ = writeln!(out, "phi(N)/N     = {}", self.phi_ratio);
        let _ = writeln!(out, "window sum   = {}", self.window_sum);
        let _ = writeln!(out, "density      = {}", self.density_bound);
        let _ = writeln!(out, "certified    > {:.6}", self.certified_lower);
        let _ = writeln!(out, "log10(modulus) ~ {:.4e}", self.digits_estimate);
        out
    }
}

/// Run the large numerical example over the given primes. With the
/// canonical 10^7-prime table this reproduces the published bounds
/// (density > 0.5004 for N, > 0.5003 for the NPrime variant); other table
/// sizes are allowed but flagged as non-reproduction runs.
pub fn run_example(primes: &PrimeTable, variant: Variant) -> Result<ExampleReport> {
    if primes.is_empty() {
        return Err(Error::Domain(
            "the example needs a nonempty prime table".into(),
        ));
    }
    let window = reproduction_window();
    let sigma: SymSums<ApproxValue> = series::power_sums(primes, 13)?;
    let s = series::complete_homogeneous(&sigma)?;
    let phi_ratio = series::phi_ratio_log(primes)?.exp();

    let sum_over = |table: &[ApproxValue]| -> ApproxValue {
        window
            .values()
            .fold(ApproxValue::exact(0.0), |acc, j| acc + table[j as usize])
    };
    let s_values: Vec<ApproxValue> = (0..=13).map(|j| *s.value(j)).collect();
    let window_sum_n = sum_over(&s_values);
    let density_n = phi_ratio * window_sum_n;

    let ln_modulus_full = {
        let acc = kahan::chunked_sum(primes.primes(), |p| (p as f64).ln());
        f64::from(MODULUS_EXPONENT) * acc.value()
    };

    let (window_sum, density, digits_estimate) = match variant {
        Variant::N => (window_sum_n, density_n, ln_modulus_full / LN_10),
        Variant::NPrime => {
            let (small, large) = primes.split_at_value(NPRIME_SPLIT);
            let sigma_small: SymSums<ApproxValue> =
                series::power_sums_slice(small, primes.provenance(), 13);
            let sigma_large: SymSums<ApproxValue> =
                series::power_sums_slice(large, primes.provenance(), 13);
            let s_small = series::complete_homogeneous(&sigma_small)?;
            let e_large = series::elementary_symmetric(&sigma_large)?;
            // T_j = sum_i e_i(large) * S_{j-i}(small): capped at exponent 1
            // above the split, unconstrained (up to omega 13) below it.
            let t: Vec<ApproxValue> = (0..=13u32)
                .map(|j| {
                    (0..=j).fold(ApproxValue::exact(0.0), |acc, i| {
                        acc + *e_large.value(i) * *s_small.value(j - i)
                    })
                })
                .collect();
            let window_sum = sum_over(&t);
            let density = phi_ratio * window_sum;
            if density.lower_bound() > density_n.lower_bound() {
                return Err(Error::Inconsistency(format!(
                    "capped variant certifies {} but the full modulus only {}; capping can only remove terms",
                    density.lower_bound(),
                    density_n.lower_bound()
                )));
            }
            let ln_small = kahan::chunked_sum(small, |p| (p as f64).ln()).value();
            let ln_large = kahan::chunked_sum(large, |p| (p as f64).ln()).value();
            let digits = (f64::from(MODULUS_EXPONENT) * ln_small + 2.0 * ln_large) / LN_10;
            (window_sum, density, digits)
        }
    };

    Ok(ExampleReport {
        variant,
        prime_count: primes.len() as u64,
        reproduction: primes.len() as u64 == REPRODUCTION_PRIME_COUNT,
        window,
        sigma,
        s,
        phi_ratio,
        window_sum,
        density_bound: density,
        certified_lower: density.lower_bound(),
        digits_estimate,
    })
}

/// A quadratic-nonresidue construction, possibly degenerate (p = 2, a = 1
/// admits no residue that is 3 mod 4).
#[derive(Clone, Debug)]
pub struct QnrSet {
    pub set: ResidueSet,
    pub degenerate: bool,
}

/// The product-free set of residues mod p^a built from powers of p times
/// quadratic nonresidues: for odd p the nonzero residues `p^k * u` with
/// `0 <= k < a` and `u` a nonresidue mod p (cardinality `(p^a - 1) / 2`);
/// for p = 2 the residues `2^k * u` with `0 <= k <= a - 2` and
/// `u = 3 (mod 4)` (cardinality `2^(a-1) - 1`).
pub fn qnr_set(p: u64, a: u32) -> Result<QnrSet> {
    qnr_set_with_limit(p, a, DEFAULT_MODULUS_LIMIT)
}

pub fn qnr_set_with_limit(p: u64, a: u32, limit: u64) -> Result<QnrSet> {
    if !arith::is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if a == 0 {
        return Err(Error::Domain("exponent a must be >= 1".into()));
    }
    let mut pa: u64 = 1;
    for _ in 0..a {
        pa = pa
            .checked_mul(p)
            .ok_or_else(|| Error::Overflow(format!("{p}^{a} exceeds the 64-bit range")))?;
    }
    if pa > limit {
        return Err(Error::Resource {
            what: "explicit modulus",
            needed: u128::from(pa),
            budget: u128::from(limit),
        });
    }

    if p == 2 {
        if a == 1 {
            return Ok(QnrSet {
                set: ResidueSet::new(2)?,
                degenerate: true,
            });
        }
        let mut set = ResidueSet::new(pa)?;
        for s in 1..pa {
            let k = s.trailing_zeros();
            let u = s >> k;
            if k <= a - 2 && u % 4 == 3 {
                set.insert(s);
            }
        }
        let expected = (1u64 << (a - 1)) - 1;
        if set.len() != expected {
            return Err(Error::Inconsistency(format!(
                "2^{a} construction has {} members, expected {expected}",
                set.len()
            )));
        }
        return Ok(QnrSet {
            set,
            degenerate: false,
        });
    }

    let mut is_square = vec![false; p as usize];
    for x in 1..p {
        is_square[((x * x) % p) as usize] = true;
    }
    let mut set = ResidueSet::new(pa)?;
    for s in 1..pa {
        let mut u = s;
        while u % p == 0 {
            u /= p;
        }
        if !is_square[(u % p) as usize] {
            set.insert(s);
        }
    }
    let expected = (pa - 1) / 2;
    if set.len() != expected {
        return Err(Error::Inconsistency(format!(
            "{p}^{a} construction has {} members, expected {expected}",
            set.len()
        )));
    }
    Ok(QnrSet {
        set,
        degenerate: false,
    })
}

/// `alpha_0 = (1 - (1/2) e log 2)^(-1)`, the exponent of the logarithmic
/// density lower bound. Approximately 17.26659.
pub fn alpha0() -> f64 {
    1.0 / (1.0 - 0.5 * E * LN_2)
}

#[derive(Clone, Copy, Debug)]
pub struct DeltaBound {
    pub value: f64,
    pub underflow: bool,
    pub alpha0: f64,
}

/// The lower bound `1 / exp(exp((C / (1 - u))^alpha_0))` for the
/// logarithmic density of moduli whose best density exceeds u. Returns 0
/// with an underflow flag once the double exponential leaves f64 range.
pub fn delta_lower_bound(u: f64, c: f64) -> Result<DeltaBound> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!(
            "delta bound needs 0 < u < 1, got {u}"
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!(
            "constant C must be positive, got {c}"
        )));
    }
    let a0 = alpha0();
    let value = (-((c / (1.0 - u)).powf(a0)).exp()).exp();
    Ok(DeltaBound {
        value,
        underflow: value == 0.0,
        alpha0: a0,
    })
}
