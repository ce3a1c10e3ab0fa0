//! Independent checkers and exact solvers: product-freeness verification,
//! (k, j)-product-freeness, and the exact maximum-density product-free
//! subset of Z/nZ by branch and bound.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num::rational::Ratio;
use num::BigUint;

use crate::construct::ResidueSet;
use crate::error::{Error, Result};

/// A concrete witness of a violated product-freeness property. Replaying
/// the witness against the set reproduces the violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// `a * b = product` with all three in the set (a = b allowed).
    PairProduct { a: u64, b: u64, product: u64 },
    /// `left[0] * ... * left[k-1] = right[0] * ... * right[j-1] = product`
    /// with every factor in the set.
    KjProduct {
        left: Vec<u64>,
        right: Vec<u64>,
        product: BigUint,
    },
}

impl Counterexample {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Counterexample::PairProduct { a, b, product } => serde_json::json!({
                "kind": "pair-product",
                "a": a,
                "b": b,
                "product": product,
            }),
            Counterexample::KjProduct {
                left,
                right,
                product,
            } => serde_json::json!({
                "kind": "kj-product",
                "left": left,
                "right": right,
                "product": product.to_string(),
            }),
        }
    }

    /// Check the witness against a residue set.
    pub fn replay_residues(&self, set: &ResidueSet) -> bool {
        let n = set.modulus();
        match self {
            Counterexample::PairProduct { a, b, product } => {
                set.contains(*a)
                    && set.contains(*b)
                    && set.contains(*product)
                    && mul_mod(*a, *b, n) == *product
            }
            Counterexample::KjProduct {
                left,
                right,
                product,
            } => {
                let all_in = left.iter().chain(right).all(|&m| set.contains(m));
                let lp = left.iter().fold(1u64 % n, |acc, &m| mul_mod(acc, m, n));
                let rp = right.iter().fold(1u64 % n, |acc, &m| mul_mod(acc, m, n));
                all_in && lp == rp && BigUint::from(lp) == *product
            }
        }
    }

    /// Check the witness against an integer set.
    pub fn replay_integers(&self, members: &[u64]) -> bool {
        let set: HashSet<u64> = members.iter().copied().collect();
        match self {
            Counterexample::PairProduct { a, b, product } => {
                set.contains(a)
                    && set.contains(b)
                    && set.contains(product)
                    && a.checked_mul(*b) == Some(*product)
            }
            Counterexample::KjProduct {
                left,
                right,
                product,
            } => {
                let all_in = left.iter().chain(right).all(|m| set.contains(m));
                let lp: BigUint = left.iter().map(|&m| BigUint::from(m)).product();
                let rp: BigUint = right.iter().map(|&m| BigUint::from(m)).product();
                all_in && lp == rp && lp == *product
            }
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::PairProduct { a, b, product } => {
                write!(f, "{a} * {b} = {product} stays in the set")
            }
            Counterexample::KjProduct {
                left,
                right,
                product,
            } => {
                write!(f, "{left:?} and {right:?} share the product {product}")
            }
        }
    }
}

/// Outcome of a checker: either the property holds or a witness refutes it.
#[derive(Clone, Debug)]
pub enum Verdict {
    Pass,
    Fail(Counterexample),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(c) => Some(c),
        }
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64
}

/// Exhaustive product-freeness check over residues: every ordered pair
/// (a, b), a = b included, must have `a * b mod n` outside the set. The
/// empty set passes; {0} or any idempotent element fails.
pub fn is_product_free_residues(set: &ResidueSet) -> Verdict {
    let members = set.members();
    let n = set.modulus();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i..] {
            let product = mul_mod(a, b, n);
            if set.contains(product) {
                return Verdict::Fail(Counterexample::PairProduct { a, b, product });
            }
        }
    }
    Verdict::Pass
}

fn validate_integer_members(members: &[u64]) -> Result<Vec<u64>> {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    if sorted.first() == Some(&0) {
        return Err(Error::Domain(
            "integer sets must contain only values >= 1".into(),
        ));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("integer set members must be distinct".into()));
    }
    Ok(sorted)
}

/// Product-freeness over the integers. Products above the largest member
/// cannot land in the set, so the scan stays near-linear for sparse sets.
pub fn is_product_free_integers(members: &[u64]) -> Result<Verdict> {
    let sorted = validate_integer_members(members)?;
    let Some(&max) = sorted.last() else {
        return Ok(Verdict::Pass);
    };
    let set: HashSet<u64> = sorted.iter().copied().collect();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i..] {
            match a.checked_mul(b) {
                Some(product) if product <= max => {
                    if set.contains(&product) {
                        return Ok(Verdict::Fail(Counterexample::PairProduct { a, b, product }));
                    }
                }
                _ => break, // b ascending: products only grow
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Whether products are taken modulo n or over the integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetMode {
    Residues(u64),
    Integers,
}

/// Plain (k, j)-product-freeness forbids any solution of
/// `a_1 ... a_k = b_1 ... b_j`; the multiset variant (meaningful for k = j)
/// only counts solutions where the two sides differ as multisets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KjSemantics {
    Plain,
    Multiset,
}

/// Default number of product evaluations the (k, j) checker may spend.
pub const DEFAULT_KJ_BUDGET: u64 = 10_000_000;

struct Meter {
    spent: u64,
    budget: u64,
}

impl Meter {
    fn charge(&mut self) -> Result<()> {
        self.spent += 1;
        if self.spent > self.budget {
            Err(Error::Budget {
                what: "(k,j) product enumeration",
                budget: self.budget,
                spent: self.spent,
            })
        } else {
            Ok(())
        }
    }
}

/// First witness map for residue products: dense for small moduli, hashed
/// otherwise.
enum ProductIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl ProductIndex {
    fn new(n: u64) -> Self {
        if n <= 1 << 22 {
            ProductIndex::Dense(vec![0; n as usize])
        } else {
            ProductIndex::Sparse(HashMap::new())
        }
    }

    fn get(&self, product: u64) -> Option<u32> {
        match self {
            ProductIndex::Dense(v) => {
                let id = v[product as usize];
                (id != 0).then(|| id - 1)
            }
            ProductIndex::Sparse(m) => m.get(&product).copied(),
        }
    }

    /// Record `product -> id` if the product is new; returns whether it was.
    fn set_if_absent(&mut self, product: u64, id: u32) -> bool {
        match self {
            ProductIndex::Dense(v) => {
                if v[product as usize] == 0 {
                    v[product as usize] = id + 1;
                    true
                } else {
                    false
                }
            }
            ProductIndex::Sparse(m) => match m.entry(product) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(id);
                    true
                }
                std::collections::hash_map::Entry::Occupied(_) => false,
            },
        }
    }
}

fn kj_residues(members: &[u64], k: u32, j: u32, n: u64, meter: &mut Meter) -> Result<Verdict> {
    // Enumerate multisets as non-decreasing index sequences; store the first
    // witness multiset per product value.
    fn walk(
        members: &[u64],
        n: u64,
        remaining: u32,
        start: usize,
        product: u64,
        current: &mut Vec<u64>,
        meter: &mut Meter,
        on_complete: &mut dyn FnMut(u64, &[u64]) -> Option<Counterexample>,
    ) -> Result<Option<Counterexample>> {
        if remaining == 0 {
            return Ok(on_complete(product, current));
        }
        for i in start..members.len() {
            meter.charge()?;
            let next = mul_mod(product, members[i], n);
            current.push(members[i]);
            let hit = walk(
                members,
                n,
                remaining - 1,
                i,
                next,
                current,
                meter,
                on_complete,
            )?;
            current.pop();
            if hit.is_some() {
                return Ok(hit);
            }
        }
        Ok(None)
    }

    if k == j {
        // Multiset semantics: a collision between two enumerated multisets
        // is automatically a collision of distinct multisets.
        let mut index = ProductIndex::new(n);
        let mut stored: Vec<Vec<u64>> = Vec::new();
        let mut current = Vec::with_capacity(k as usize);
        let hit = walk(
            members,
            n,
            k,
            0,
            1 % n,
            &mut current,
            meter,
            &mut |product, ms| {
                if let Some(prev) = index.get(product) {
                    return Some(Counterexample::KjProduct {
                        left: ms.to_vec(),
                        right: stored[prev as usize].clone(),
                        product: BigUint::from(product),
                    });
                }
                if index.set_if_absent(product, stored.len() as u32) {
                    stored.push(ms.to_vec());
                }
                None
            },
        )?;
        return Ok(match hit {
            Some(c) => Verdict::Fail(c),
            None => Verdict::Pass,
        });
    }

    let mut index = ProductIndex::new(n);
    let mut stored: Vec<Vec<u64>> = Vec::new();
    let mut current = Vec::with_capacity(j as usize);
    walk(
        members,
        n,
        j,
        0,
        1 % n,
        &mut current,
        meter,
        &mut |product, ms| {
            if index.set_if_absent(product, stored.len() as u32) {
                stored.push(ms.to_vec());
            }
            None
        },
    )?;

    let mut current = Vec::with_capacity(k as usize);
    let hit = walk(
        members,
        n,
        k,
        0,
        1 % n,
        &mut current,
        meter,
        &mut |product, ms| {
            index.get(product).map(|id| Counterexample::KjProduct {
                left: ms.to_vec(),
                right: stored[id as usize].clone(),
                product: BigUint::from(product),
            })
        },
    )?;
    Ok(match hit {
        Some(c) => Verdict::Fail(c),
        None => Verdict::Pass,
    })
}

fn kj_integers(members: &[u64], k: u32, j: u32, meter: &mut Meter) -> Result<Verdict> {
    fn walk(
        members: &[u64],
        remaining: u32,
        start: usize,
        product: BigUint,
        current: &mut Vec<u64>,
        meter: &mut Meter,
        on_complete: &mut dyn FnMut(&BigUint, &[u64]) -> Option<Counterexample>,
    ) -> Result<Option<Counterexample>> {
        if remaining == 0 {
            return Ok(on_complete(&product, current));
        }
        for i in start..members.len() {
            meter.charge()?;
            let next = &product * members[i];
            current.push(members[i]);
            let hit = walk(members, remaining - 1, i, next, current, meter, on_complete)?;
            current.pop();
            if hit.is_some() {
                return Ok(hit);
            }
        }
        Ok(None)
    }

    if k == j {
        let mut seen: HashMap<BigUint, Vec<u64>> = HashMap::new();
        let mut current = Vec::with_capacity(k as usize);
        let hit = walk(
            members,
            k,
            0,
            BigUint::from(1u32),
            &mut current,
            meter,
            &mut |product, ms| {
                if let Some(prev) = seen.get(product) {
                    return Some(Counterexample::KjProduct {
                        left: ms.to_vec(),
                        right: prev.clone(),
                        product: product.clone(),
                    });
                }
                seen.insert(product.clone(), ms.to_vec());
                None
            },
        )?;
        return Ok(match hit {
            Some(c) => Verdict::Fail(c),
            None => Verdict::Pass,
        });
    }

    let mut seen: HashMap<BigUint, Vec<u64>> = HashMap::new();
    let mut current = Vec::with_capacity(j as usize);
    walk(
        members,
        j,
        0,
        BigUint::from(1u32),
        &mut current,
        meter,
        &mut |product, ms| {
            seen.entry(product.clone()).or_insert_with(|| ms.to_vec());
            None
        },
    )?;

    let mut current = Vec::with_capacity(k as usize);
    let hit = walk(
        members,
        k,
        0,
        BigUint::from(1u32),
        &mut current,
        meter,
        &mut |product, ms| {
            seen.get(product).map(|prev| Counterexample::KjProduct {
                left: ms.to_vec(),
                right: prev.clone(),
                product: product.clone(),
            })
        },
    )?;
    Ok(match hit {
        Some(c) => Verdict::Fail(c),
        None => Verdict::Pass,
    })
}

/// The (k, j)-product-freeness checker. Requires `k >= j >= 1`. Plain
/// semantics with k = j is trivially violated by any nonempty set (both
/// sides can repeat one element); the checker returns that witness
/// directly. The budget bounds the number of product evaluations and is
/// enforced, never silently truncated.
pub fn is_kj_product_free(
    members: &[u64],
    k: u32,
    j: u32,
    mode: SetMode,
    semantics: KjSemantics,
    budget: u64,
) -> Result<Verdict> {
    if j < 1 || k < j {
        return Err(Error::Domain(format!(
            "need k >= j >= 1, got k = {k}, j = {j}"
        )));
    }
    let sorted = match mode {
        SetMode::Integers => validate_integer_members(members)?,
        SetMode::Residues(n) => {
            if n == 0 {
                return Err(Error::Domain("modulus must be >= 1".into()));
            }
            let mut sorted = members.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain("residue set members must be distinct".into()));
            }
            if let Some(&m) = sorted.last() {
                if m >= n {
                    return Err(Error::Domain(format!("residue {m} out of range mod {n}")));
                }
            }
            sorted
        }
    };
    if sorted.is_empty() {
        return Ok(Verdict::Pass);
    }
    if k == j && semantics == KjSemantics::Plain {
        // a^k = a^k for any member a
        let a = sorted[0];
        let product = match mode {
            SetMode::Integers => (0..k).map(|_| BigUint::from(a)).product(),
            SetMode::Residues(n) => BigUint::from((0..k).fold(1 % n, |acc, _| mul_mod(acc, a, n))),
        };
        return Ok(Verdict::Fail(Counterexample::KjProduct {
            left: vec![a; k as usize],
            right: vec![a; k as usize],
            product,
        }));
    }
    let mut meter = Meter { spent: 0, budget };
    match mode {
        SetMode::Residues(n) => kj_residues(&sorted, k, j, n, &mut meter),
        SetMode::Integers => kj_integers(&sorted, k, j, &mut meter),
    }
}

/// Result of the exact maximum product-free search.
#[derive(Clone, Debug)]
pub struct MaxFreeResult {
    pub modulus: u64,
    pub best_set: ResidueSet,
    /// Exact density |S| / n, reduced.
    pub d_value: Ratio<u64>,
    pub nodes_explored: u64,
}

impl MaxFreeResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.modulus,
            "d": self.d_value.to_string(),
            "density": self.best_set.len() as f64 / self.modulus as f64,
            "set": self.best_set.members(),
            "nodes_explored": self.nodes_explored,
        })
    }
}

/// Default ceiling for the exact search.
pub const DEFAULT_SEARCH_LIMIT: u64 = 40;

/// Largest modulus the bitmask search supports.
const SEARCH_HARD_CAP: u64 = 128;

struct Search {
    n: u64,
    cands: Vec<u64>, // ordered: conflict degree desc, residue asc
    best_size: usize,
    nodes: u64,
}

impl Search {
    /// Could residue r join the chosen set without creating a product
    /// relation? `chosen` and `products` are bitmasks over residues.
    fn compatible(&self, r: u64, chosen_list: &[u64], chosen: u128, products: u128) -> bool {
        if products & (1u128 << r) != 0 {
            return false; // r is already a product of two chosen elements
        }
        let with_r = chosen | (1u128 << r);
        let rr = mul_mod(r, r, self.n);
        if with_r & (1u128 << rr) != 0 {
            return false;
        }
        for &s in chosen_list {
            let rs = mul_mod(r, s, self.n);
            if with_r & (1u128 << rs) != 0 {
                return false;
            }
        }
        true
    }

    fn augment_products(&self, r: u64, chosen_list: &[u64], products: u128) -> u128 {
        let mut out = products | (1u128 << mul_mod(r, r, self.n));
        for &s in chosen_list {
            out |= 1u128 << mul_mod(r, s, self.n);
        }
        out
    }

    /// Phase 1: maximum size, pruning whenever the remaining compatible
    /// candidates cannot beat the incumbent.
    fn max_size(&mut self, idx: usize, chosen_list: &mut Vec<u64>, chosen: u128, products: u128) {
        self.nodes += 1;
        if chosen_list.len() > self.best_size {
            self.best_size = chosen_list.len();
        }
        if idx == self.cands.len() {
            return;
        }
        let remaining = self.cands[idx..]
            .iter()
            .filter(|&&r| self.compatible(r, chosen_list, chosen, products))
            .count();
        if chosen_list.len() + remaining <= self.best_size {
            return;
        }
        let r = self.cands[idx];
        if self.compatible(r, chosen_list, chosen, products) {
            let new_products = self.augment_products(r, chosen_list, products);
            chosen_list.push(r);
            self.max_size(idx + 1, chosen_list, chosen | (1u128 << r), new_products);
            chosen_list.pop();
        }
        self.max_size(idx + 1, chosen_list, chosen, products);
    }

    /// Phase 2: the lexicographically smallest membership vector among sets
    /// of the optimal size. Candidates are scanned in ascending residue
    /// order, excluding first, so the first complete solution is minimal.
    fn lex_smallest(
        &mut self,
        cands_asc: &[u64],
        idx: usize,
        chosen_list: &mut Vec<u64>,
        chosen: u128,
        products: u128,
        out: &mut Vec<u64>,
    ) -> bool {
        self.nodes += 1;
        if chosen_list.len() == self.best_size {
            out.extend_from_slice(chosen_list);
            return true;
        }
        if idx == cands_asc.len() {
            return false;
        }
        let remaining = cands_asc[idx..]
            .iter()
            .filter(|&&r| self.compatible(r, chosen_list, chosen, products))
            .count();
        if chosen_list.len() + remaining < self.best_size {
            return false;
        }
        if self.lex_smallest(cands_asc, idx + 1, chosen_list, chosen, products, out) {
            return true;
        }
        let r = cands_asc[idx];
        if self.compatible(r, chosen_list, chosen, products) {
            let new_products = self.augment_products(r, chosen_list, products);
            chosen_list.push(r);
            if self.lex_smallest(
                cands_asc,
                idx + 1,
                chosen_list,
                chosen | (1u128 << r),
                new_products,
                out,
            ) {
                return true;
            }
            chosen_list.pop();
        }
        false
    }
}

pub fn max_product_free(n: u64) -> Result<MaxFreeResult> {
    max_product_free_with_limit(n, DEFAULT_SEARCH_LIMIT)
}

/// Exact D(n) by branch and bound. Residues 0 and 1 are excluded up front
/// (both are idempotent); candidates are ordered by descending conflict
/// degree; the bound is |chosen| + |remaining compatible|. A second,
/// lexicographic pass reconstructs the canonical optimal set, so results
/// are reproducible regardless of search order.
pub fn max_product_free_with_limit(n: u64, limit: u64) -> Result<MaxFreeResult> {
    if n == 0 {
        return Err(Error::Domain("modulus must be >= 1".into()));
    }
    if n > limit || n > SEARCH_HARD_CAP {
        return Err(Error::Resource {
            what: "exact search modulus",
            needed: u128::from(n),
            budget: u128::from(limit.min(SEARCH_HARD_CAP)),
        });
    }
    let cands_asc: Vec<u64> = (2..n).collect();
    let cand_set: HashSet<u64> = cands_asc.iter().copied().collect();

    // conflict degree: appearances in product triples (a, b, a*b mod n)
    let mut degree: HashMap<u64, u64> = cands_asc.iter().map(|&r| (r, 0)).collect();
    for &a in &cands_asc {
        for &b in &cands_asc {
            let c = mul_mod(a, b, n);
            if cand_set.contains(&c) {
                *degree.get_mut(&a).unwrap() += 1;
                *degree.get_mut(&b).unwrap() += 1;
                *degree.get_mut(&c).unwrap() += 1;
            }
        }
    }
    let mut ordered = cands_asc.clone();
    ordered.sort_by_key(|r| (std::cmp::Reverse(degree[r]), *r));

    let mut search = Search {
        n,
        cands: ordered,
        best_size: 0,
        nodes: 0,
    };
    search.max_size(0, &mut Vec::new(), 0, 0);

    let mut members = Vec::new();
    if search.best_size > 0 {
        let found = search.lex_smallest(&cands_asc, 0, &mut Vec::new(), 0, 0, &mut members);
        debug_assert!(found, "phase 2 must recover a set of the optimal size");
    }
    members.sort_unstable();
    let best_set = ResidueSet::from_members(n, members)?;
    let d_value = Ratio::new(best_set.len(), n);
    Ok(MaxFreeResult {
        modulus: n,
        best_set,
        d_value,
        nodes_explored: search.nodes,
    })
}

/// Report of the elementary upper-bound check `|S(x)| <= x - floor(x/a)/2`
/// for a product-free set of integers with least element a.
#[derive(Clone, Debug)]
pub struct UpperBoundReport {
    pub x: u64,
    pub min_element: Option<u64>,
    pub count: u64,
    /// `x - floor(x/a)/2`, as a real (the comparison itself is exact).
    pub bound: f64,
    pub pass: bool,
    /// `|S(x)| / x`.
    pub ratio: f64,
    /// `1 - 1/(2a)`, the density this bound enforces asymptotically.
    pub asymptotic_limit: f64,
}

impl UpperBoundReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "x": self.x,
            "min_element": self.min_element,
            "count": self.count,
            "bound": self.bound,
            "pass": self.pass,
            "ratio": self.ratio,
            "asymptotic_limit": self.asymptotic_limit,
        })
    }
}

/// Verify a product-free integer set against the counting bound
/// `|S(x)| <= x - floor(x/a)/2`. The set must be product-free on [1, x];
/// a violation is a precondition failure carrying the witness.
pub fn upper_density_bound_check(members: &[u64], x: u64) -> Result<UpperBoundReport> {
    if x == 0 {
        return Err(Error::Domain("the bound check needs x >= 1".into()));
    }
    let sorted = validate_integer_members(members)?;
    if let Some(&m) = sorted.last() {
        if m > x {
            return Err(Error::Domain(format!(
                "member {m} exceeds the range bound {x}"
            )));
        }
    }
    match is_product_free_integers(&sorted)? {
        Verdict::Pass => {}
        Verdict::Fail(cex) => {
            return Err(Error::Precondition(format!(
                "set is not product-free on [1, {x}]: {cex}"
            )));
        }
    }
    let count = sorted.len() as u64;
    let (pass, bound, min_element, asymptotic_limit) = match sorted.first() {
        Some(&a) => {
            let floor_term = x / a;
            // |S(x)| <= x - floor(x/a)/2, compared exactly as 2|S| <= 2x - floor(x/a)
            let pass = 2 * count <= 2 * x - floor_term;
            (
                pass,
                x as f64 - floor_term as f64 / 2.0,
                Some(a),
                1.0 - 1.0 / (2.0 * a as f64),
            )
        }
        None => (true, x as f64, None, 1.0),
    };
    Ok(UpperBoundReport {
        x,
        min_element,
        count,
        bound,
        pass,
        ratio: count as f64 / x as f64,
        asymptotic_limit,
    })
}
