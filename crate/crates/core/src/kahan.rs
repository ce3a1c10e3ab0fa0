//! Compensated (Kahan–Neumaier) summation with the bookkeeping needed for
//! certified error bounds.
//!
//! Accumulation is chunked: a slice is split into fixed-size chunks, each
//! chunk is summed with a Neumaier accumulator, and the per-chunk totals are
//! combined in ascending chunk order. Chunks may be processed in parallel;
//! the fixed combine order makes the result identical to a sequential run.

use rayon::prelude::*;

/// Fixed chunk length used by all chunked sums (entries per chunk).
pub const CHUNK_LEN: usize = 1 << 16;

/// Neumaier accumulator that also tracks the sum of absolute values, which
/// the error certificates are proportional to.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    /// Fold another accumulator in, keeping its absolute-value tally intact.
    pub fn absorb(&mut self, chunk: Neumaier) {
        let x = chunk.value();
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += chunk.abs;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of |x| over everything added so far (plain accumulation; only
    /// used as a scale factor in error bounds, where its own rounding is
    /// absorbed by the outward factors).
    pub fn abs_sum(&self) -> f64 {
        self.abs
    }
}

/// Deterministic chunked compensated sum of `term(p)` over a prime slice.
pub fn chunked_sum<F>(primes: &[u32], term: F) -> Neumaier
where
    F: Fn(u64) -> f64 + Sync,
{
    let chunks: Vec<Neumaier> = primes
        .par_chunks(CHUNK_LEN)
        .map(|chunk| {
            let mut acc = Neumaier::new();
            for &p in chunk {
                acc.add(term(u64::from(p)));
            }
            acc
        })
        .collect();
    let mut total = Neumaier::new();
    for c in chunks {
        total.absorb(c);
    }
    total
}

/// All reciprocal power sums `sum 1/p^j` for `j = 1..=j_max` in one pass
/// over the slice. Returns one accumulator per `j`, index 0 holding `j = 1`.
pub fn chunked_power_sums(primes: &[u32], j_max: u32) -> Vec<Neumaier> {
    let j_max = j_max as usize;
    if j_max == 0 {
        return Vec::new();
    }
    let chunks: Vec<Vec<Neumaier>> = primes
        .par_chunks(CHUNK_LEN)
        .map(|chunk| {
            let mut accs = vec![Neumaier::new(); j_max];
            for &p in chunk {
                let r = 1.0 / f64::from(p);
                let mut x = r;
                accs[0].add(x);
                for acc in accs.iter_mut().skip(1) {
                    x *= r;
                    acc.add(x);
                }
            }
            accs
        })
        .collect();
    let mut totals = vec![Neumaier::new(); j_max];
    for chunk in chunks {
        for (total, part) in totals.iter_mut().zip(chunk) {
            total.absorb(part);
        }
    }
    totals
}
