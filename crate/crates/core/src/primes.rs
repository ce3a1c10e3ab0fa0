//! Prime table generation, storage, and loading.
//!
//! Sieving is a segmented, odd-only sieve of Eratosthenes: base primes up to
//! sqrt(limit) come from a plain sieve, then fixed-length segments are marker
//! swept (in parallel) and concatenated in ascending order, so the output is
//! identical to a sequential run. All primes this crate ever needs fit in 32
//! bits (the 10^7-th prime is 179,424,673), which keeps a 10^7-entry table
//! at 40 MB on disk.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default memory budget for a sieve run (output table plus scratch).
pub const DEFAULT_SIEVE_BUDGET_BYTES: u128 = 256 << 20;

/// Default number of odd integers per sieve segment (2 MiB span).
pub const DEFAULT_SEGMENT_ODDS: usize = 1 << 20;

const MAGIC: &[u8; 8] = b"PFPRIMES";
const VERSION: u8 = 0x01;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// The table holds exactly the first `n` primes.
    FirstN(u64),
    /// The table holds exactly the primes `<= limit`.
    Upto(u64),
}

impl Provenance {
    pub fn to_json(self) -> serde_json::Value {
        match self {
            Provenance::FirstN(n) => serde_json::json!({ "first_n": n }),
            Provenance::Upto(x) => serde_json::json!({ "upto": x }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u32>,
    provenance: Provenance,
}

impl PrimeTable {
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn last(&self) -> Option<u64> {
        self.primes.last().map(|&p| u64::from(p))
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn iter_u64(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| u64::from(p))
    }

    /// Largest `x` for which the table is guaranteed to contain every prime
    /// `<= x`.
    pub fn covered_limit(&self) -> u64 {
        match self.provenance {
            Provenance::Upto(x) => x,
            Provenance::FirstN(_) => self.last().unwrap_or(0),
        }
    }

    /// Split into `(primes <= bound, primes > bound)`.
    pub fn split_at_value(&self, bound: u64) -> (&[u32], &[u32]) {
        let idx = self
            .primes
            .partition_point(|&p| u64::from(p) <= bound.min(u64::from(u32::MAX)));
        self.primes.split_at(idx)
    }

    pub fn descriptor_json(&self) -> serde_json::Value {
        let mut v = self.provenance.to_json();
        v["count"] = serde_json::json!(self.len());
        v
    }

    /// Binary cache format: magic "PFPRIMES", version byte 0x01, provenance
    /// tag byte (0x00 = first_n, 0x01 = upto), provenance parameter as u64
    /// little-endian, count as u64 little-endian, then `count` primes as u32
    /// little-endian values, ascending. No padding.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(26 + 4 * self.primes.len());
        buf.extend_from_slice(MAGIC);
        buf.push(VERSION);
        let (tag, param) = match self.provenance {
            Provenance::FirstN(n) => (0x00u8, n),
            Provenance::Upto(x) => (0x01u8, x),
        };
        buf.push(tag);
        buf.extend_from_slice(&param.to_le_bytes());
        buf.extend_from_slice(&(self.primes.len() as u64).to_le_bytes());
        for &p in &self.primes {
            buf.extend_from_slice(&p.to_le_bytes());
        }
        let mut file = fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<PrimeTable> {
        let data = fs::read(path)?;
        Self::from_bytes(&data)
    }

    fn from_bytes(data: &[u8]) -> Result<PrimeTable> {
        let fail = |offset: u64, what: &str| Error::Format {
            offset,
            what: what.to_string(),
        };
        if data.len() < 8 {
            return Err(fail(data.len() as u64, "truncated magic"));
        }
        if &data[..8] != MAGIC {
            return Err(fail(0, "bad magic (expected \"PFPRIMES\")"));
        }
        if data.len() < 9 {
            return Err(fail(8, "truncated version byte"));
        }
        if data[8] != VERSION {
            return Err(fail(8, &format!("unsupported version {:#04x}", data[8])));
        }
        if data.len() < 10 {
            return Err(fail(9, "truncated provenance tag"));
        }
        let tag = data[9];
        if tag > 0x01 {
            return Err(fail(9, &format!("invalid provenance tag {tag:#04x}")));
        }
        if data.len() < 18 {
            return Err(fail(10, "truncated provenance parameter"));
        }
        let param = u64::from_le_bytes(data[10..18].try_into().unwrap());
        if data.len() < 26 {
            return Err(fail(18, "truncated count field"));
        }
        let count = u64::from_le_bytes(data[18..26].try_into().unwrap());
        let payload = &data[26..];
        let expected = count.checked_mul(4);
        if expected != Some(payload.len() as u64) {
            return Err(fail(
                18,
                &format!(
                    "count field ({count}) inconsistent with payload of {} bytes",
                    payload.len()
                ),
            ));
        }
        let mut primes = Vec::with_capacity(count as usize);
        let mut prev: u64 = 0;
        for (i, chunk) in payload.chunks_exact(4).enumerate() {
            let p = u32::from_le_bytes(chunk.try_into().unwrap());
            let offset = 26 + 4 * i as u64;
            if u64::from(p) <= prev {
                return Err(fail(
                    offset,
                    &format!("primes not strictly ascending at index {i}"),
                ));
            }
            if (i == 0 && p != 2) || (i > 0 && p % 2 == 0) {
                return Err(fail(
                    offset,
                    &format!("impossible prime value {p} at index {i}"),
                ));
            }
            prev = u64::from(p);
            primes.push(p);
        }
        let provenance = match tag {
            0x00 => {
                if param != count {
                    return Err(fail(
                        18,
                        &format!(
                            "count field ({count}) does not match first_n provenance ({param})"
                        ),
                    ));
                }
                Provenance::FirstN(param)
            }
            _ => {
                if prev > param {
                    return Err(fail(
                        10,
                        &format!("table contains prime {prev} beyond its upto bound {param}"),
                    ));
                }
                Provenance::Upto(param)
            }
        };
        Ok(PrimeTable { primes, provenance })
    }

    /// CSV export: one prime per line, decimal.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for &p in &self.primes {
            writeln!(out, "{p}")?;
        }
        Ok(())
    }
}

fn prime_count_upper_estimate(limit: u64) -> u64 {
    if limit < 60 {
        return 20;
    }
    let x = limit as f64;
    (x / (x.ln() - 1.12)).ceil() as u64 + 64
}

fn check_budget(limit: u64, segment_odds: usize, budget_bytes: u128) -> Result<()> {
    if limit > u64::from(u32::MAX) {
        return Err(Error::Resource {
            what: "sieve limit (table stores 32-bit primes)",
            needed: u128::from(limit),
            budget: u128::from(u32::MAX),
        });
    }
    let needed = u128::from(prime_count_upper_estimate(limit)) * 4
        + segment_odds as u128
        + u128::from(integer_sqrt(limit)) / 2;
    if needed > budget_bytes {
        return Err(Error::Resource {
            what: "sieve memory",
            needed,
            budget: budget_bytes,
        });
    }
    Ok(())
}

fn integer_sqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |sq| sq <= n) {
        r += 1;
    }
    r
}

/// Plain odd-only sieve, used for base primes and tiny limits.
fn simple_sieve(limit: u64) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let mut primes = vec![2u32];
    if limit < 3 {
        return primes;
    }
    let n_odds = ((limit - 3) / 2 + 1) as usize; // odds 3, 5, ..., <= limit
    let mut composite = vec![false; n_odds];
    for i in 0..n_odds {
        if composite[i] {
            continue;
        }
        let p = 3 + 2 * i as u64;
        if p * p > limit {
            break;
        }
        let mut m = p * p;
        while m <= limit {
            composite[((m - 3) / 2) as usize] = true;
            m += 2 * p;
        }
    }
    for (idx, &c) in composite.iter().enumerate() {
        if !c {
            primes.push((3 + 2 * idx as u64) as u32);
        }
    }
    primes
}

fn sieve_segment(seg_lo: u64, n_odds: usize, base_odd: &[u32]) -> Vec<u32> {
    // seg_lo is the first odd number of the segment.
    let seg_hi = seg_lo + 2 * (n_odds as u64 - 1);
    let mut composite = vec![false; n_odds];
    for &bp in base_odd {
        let p = u64::from(bp);
        let p2 = p * p;
        if p2 > seg_hi {
            break;
        }
        let mut start = if p2 >= seg_lo {
            p2
        } else {
            // first odd multiple of p >= seg_lo
            let mut m = seg_lo.div_ceil(p) * p;
            if m % 2 == 0 {
                m += p;
            }
            m
        };
        while start <= seg_hi {
            composite[((start - seg_lo) / 2) as usize] = true;
            start += 2 * p;
        }
    }
    let mut out = Vec::new();
    for (idx, &c) in composite.iter().enumerate() {
        if !c {
            out.push((seg_lo + 2 * idx as u64) as u32);
        }
    }
    out
}

/// All primes `<= limit`, with full control over budget and segment length.
pub fn sieve_upto_with(limit: u64, budget_bytes: u128, segment_odds: usize) -> Result<PrimeTable> {
    assert!(segment_odds > 0, "segment length must be positive");
    check_budget(limit, segment_odds, budget_bytes)?;
    let provenance = Provenance::Upto(limit);
    if limit < 3 {
        return Ok(PrimeTable {
            primes: if limit == 2 { vec![2] } else { Vec::new() },
            provenance,
        });
    }
    if limit <= 1 << 16 {
        return Ok(PrimeTable {
            primes: simple_sieve(limit),
            provenance,
        });
    }
    let base = simple_sieve(integer_sqrt(limit));
    let base_odd: Vec<u32> = base.iter().copied().filter(|&p| p > 2).collect();
    let total_odds = ((limit - 3) / 2 + 1) as usize;
    let n_segments = total_odds.div_ceil(segment_odds);
    let mut primes = vec![2u32];
    let segments: Vec<Vec<u32>> = (0..n_segments)
        .into_par_iter()
        .map(|s| {
            let lo = 3 + 2 * (s * segment_odds) as u64;
            let n = segment_odds.min(total_odds - s * segment_odds);
            sieve_segment(lo, n, &base_odd)
        })
        .collect();
    for seg in segments {
        primes.extend_from_slice(&seg);
    }
    Ok(PrimeTable { primes, provenance })
}

/// All primes `<= limit` under the default memory budget.
pub fn sieve_upto(limit: u64) -> Result<PrimeTable> {
    sieve_upto_with(limit, DEFAULT_SIEVE_BUDGET_BYTES, DEFAULT_SEGMENT_ODDS)
}

/// Exactly the first `count` primes. Over-sieves with the nth-prime bound
/// `p_n < n (ln n + ln ln n)` (valid for n >= 6) and truncates; the retry
/// loop only fires if the bound were ever short.
pub fn first_n_primes(count: u64) -> Result<PrimeTable> {
    first_n_primes_with_budget(count, DEFAULT_SIEVE_BUDGET_BYTES)
}

pub fn first_n_primes_with_budget(count: u64, budget_bytes: u128) -> Result<PrimeTable> {
    const SMALL: [u32; 5] = [2, 3, 5, 7, 11];
    let provenance = Provenance::FirstN(count);
    if count as usize <= SMALL.len() {
        return Ok(PrimeTable {
            primes: SMALL[..count as usize].to_vec(),
            provenance,
        });
    }
    let n = count as f64;
    let mut bound = (n * (n.ln() + n.ln().ln())).ceil() as u64 + 16;
    loop {
        let table = sieve_upto_with(bound, budget_bytes, DEFAULT_SEGMENT_ODDS)?;
        if table.len() as u64 >= count {
            let mut primes = table.primes;
            primes.truncate(count as usize);
            return Ok(PrimeTable { primes, provenance });
        }
        bound = bound + bound / 4 + 16;
    }
}

/// Build a table directly from a prime list (used by tests and by callers
/// that already hold a verified list).
pub fn table_from_parts(primes: Vec<u32>, provenance: Provenance) -> PrimeTable {
    debug_assert!(primes.windows(2).all(|w| w[0] < w[1]));
    PrimeTable { primes, provenance }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent trial-division oracle.
    fn is_prime_naive(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    fn oracle_upto(limit: u64) -> Vec<u32> {
        (2..=limit)
            .filter(|&n| is_prime_naive(n))
            .map(|n| n as u32)
            .collect()
    }

    #[test]
    fn sieve_small_examples() {
        assert_eq!(sieve_upto(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve_upto(1).unwrap().primes(), &[] as &[u32]);
        assert_eq!(sieve_upto(0).unwrap().primes(), &[] as &[u32]);
        assert_eq!(sieve_upto(2).unwrap().primes(), &[2]);
        assert_eq!(sieve_upto(3).unwrap().primes(), &[2, 3]);
    }

    #[test]
    fn sieve_matches_trial_division_oracle() {
        for limit in [100u64, 541, 1000, 7919, 10_000] {
            assert_eq!(
                sieve_upto(limit).unwrap().primes(),
                oracle_upto(limit).as_slice()
            );
        }
        assert_eq!(sieve_upto(100).unwrap().len(), 25);
        assert_eq!(sieve_upto(10_000).unwrap().len(), oracle_upto(10_000).len());
    }

    #[test]
    fn segmented_path_matches_simple_path() {
        // limit > 2^16 forces the segmented path; tiny segments stress the
        // boundary handling.
        let seg = sieve_upto_with(200_000, DEFAULT_SIEVE_BUDGET_BYTES, 1 << 10).unwrap();
        let simple = simple_sieve(200_000);
        assert_eq!(seg.primes(), simple.as_slice());
    }

    #[test]
    fn first_n_small_and_truncation() {
        assert_eq!(first_n_primes(0).unwrap().primes(), &[] as &[u32]);
        assert_eq!(first_n_primes(5).unwrap().primes(), &[2, 3, 5, 7, 11]);
        let t = first_n_primes(25).unwrap();
        assert_eq!(t.len(), 25);
        assert_eq!(t.last(), Some(97));
        assert_eq!(t.provenance(), Provenance::FirstN(25));
    }

    #[test]
    fn sieve_agrees_with_first_n_prefix() {
        let big = first_n_primes(1200).unwrap();
        for x in [10u64, 50, 97, 1000, 7919] {
            let upto = sieve_upto(x).unwrap();
            let prefix: Vec<u32> = big
                .primes()
                .iter()
                .copied()
                .filter(|&p| u64::from(p) <= x)
                .collect();
            assert_eq!(upto.primes(), prefix.as_slice());
        }
    }

    #[test]
    fn budget_is_enforced() {
        match sieve_upto_with(200_000_000, 1 << 20, DEFAULT_SEGMENT_ODDS) {
            Err(Error::Resource { .. }) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
        match sieve_upto(u64::from(u32::MAX) + 1) {
            Err(Error::Resource { .. }) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for count in [0u64, 1, 25] {
            let t = first_n_primes(count).unwrap();
            let path = dir.path().join(format!("t{count}.pfprimes"));
            t.save(&path).unwrap();
            assert_eq!(PrimeTable::load(&path).unwrap(), t);
        }
        let t = sieve_upto(1000).unwrap();
        let path = dir.path().join("upto.pfprimes");
        t.save(&path).unwrap();
        assert_eq!(PrimeTable::load(&path).unwrap(), t);
    }

    #[test]
    fn load_rejects_structural_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pfprimes");

        fs::write(&path, b"").unwrap();
        match PrimeTable::load(&path) {
            Err(Error::Format { offset: 0, .. }) => {}
            other => panic!("empty file: {other:?}"),
        }

        fs::write(&path, b"NOTMAGIC\x01\x00").unwrap();
        match PrimeTable::load(&path) {
            Err(Error::Format {
                offset: 0,
                ref what,
            }) => assert!(what.contains("magic")),
            other => panic!("bad magic: {other:?}"),
        }

        let t = first_n_primes(25).unwrap();
        t.save(&path).unwrap();
        let mut bytes = fs::read(&path).unwrap();

        // Corrupt the count field; the error must name it.
        bytes[18] = 0xFF;
        fs::write(&path, &bytes).unwrap();
        match PrimeTable::load(&path) {
            Err(Error::Format {
                offset: 18,
                ref what,
            }) => assert!(what.contains("count")),
            other => panic!("corrupt count: {other:?}"),
        }

        // Truncate the prime payload.
        t.save(&path).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        match PrimeTable::load(&path) {
            Err(Error::Format { offset: 18, .. }) => {}
            other => panic!("truncated payload: {other:?}"),
        }

        // Break ascending order: overwrite the second prime with 2.
        t.save(&path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[30..34].copy_from_slice(&2u32.to_le_bytes());
        fs::write(&path, &bytes).unwrap();
        match PrimeTable::load(&path) {
            Err(Error::Format {
                offset: 30,
                ref what,
            }) => assert!(what.contains("ascending")),
            other => panic!("non-ascending: {other:?}"),
        }
    }

    #[test]
    fn csv_export_one_prime_per_line() {
        let t = first_n_primes(4).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2\n3\n5\n7\n");
    }

    #[test]
    fn split_at_value_partitions() {
        let t = first_n_primes(10).unwrap();
        let (lo, hi) = t.split_at_value(11);
        assert_eq!(lo, &[2, 3, 5, 7, 11]);
        assert_eq!(hi, &[13, 17, 19, 23, 29]);
    }
}
