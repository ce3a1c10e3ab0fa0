//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line
//! (visible with `--nocapture`). The heavy shared state (the 10^7-prime
//! table and the two large example reports) is built once.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num::rational::Ratio;
use num::{BigRational, One, Zero};
use productfree::arith::{FactorShape, OmegaWindow};
use productfree::construct::{
    self, divisor_window_set, lift_to_residues, qnr_set, run_example, ExampleReport, Variant,
};
use productfree::primes::{self, PrimeTable};
use productfree::series::{self, ExponentCaps, SymSums};
use productfree::verify::{
    is_kj_product_free, is_product_free_residues, max_product_free, KjSemantics, SetMode,
};
use productfree::ApproxValue;

const PUBLISHED_SIGMA: [f64; 13] = [
    3.206219, 0.452247, 0.174763, 0.076993, 0.035755, 0.017070, 0.008284, 0.004061, 0.002004,
    0.000994, 0.000494, 0.000246, 0.000123,
];

const PUBLISHED_S: [f64; 13] = [
    3.206219, 5.366043, 6.276492, 5.796977, 4.529060, 3.130763, 1.976769, 1.167289, 0.656256,
    0.356061, 0.188345, 0.097866, 0.050226,
];

const PUBLISHED_WINDOW_SUM: f64 = 16.938967;
const PUBLISHED_PHI_BOUND: f64 = 0.029542;
const PUBLISHED_DENSITY_N: f64 = 0.5004;
const PUBLISHED_DENSITY_NPRIME: f64 = 0.5003;
const PUBLISHED_DIGITS_N: f64 = 1.09e9;
const PUBLISHED_DIGITS_NPRIME: f64 = 1.61e8;

struct Shared {
    table: PrimeTable,
    report_n: ExampleReport,
    report_nprime: ExampleReport,
    sieve_elapsed: Duration,
    pipeline_elapsed: Duration,
}

static SHARED: OnceLock<Shared> = OnceLock::new();

fn shared() -> &'static Shared {
    SHARED.get_or_init(|| {
        let t0 = Instant::now();
        let table = primes::first_n_primes(10_000_000).expect("sieve the 10^7-prime table");
        let sieve_elapsed = t0.elapsed();
        let t1 = Instant::now();
        let report_n = run_example(&table, Variant::N).expect("variant N");
        let report_nprime = run_example(&table, Variant::NPrime).expect("variant Nprime");
        let pipeline_elapsed = t1.elapsed();
        Shared {
            table,
            report_n,
            report_nprime,
            sieve_elapsed,
            pipeline_elapsed,
        }
    })
}

#[test]
fn acceptance_00_prime_table_provenance() {
    let s = shared();
    assert_eq!(s.table.len(), 10_000_000);
    // independent cross-check: a fresh bounded sieve must agree on the
    // 10^7-th prime
    let resieved = primes::sieve_upto(190_000_000).expect("bounded re-sieve");
    assert!(resieved.len() >= 10_000_000);
    assert_eq!(
        s.table.last(),
        Some(u64::from(resieved.primes()[9_999_999]))
    );
    assert_eq!(s.table.primes(), &resieved.primes()[..10_000_000]);
    println!(
        "acceptance 0 (prime table): PASS — 10^7-th prime {} confirmed by re-sieve; sieve took {:.1?}",
        s.table.last().unwrap(),
        s.sieve_elapsed
    );
}

#[test]
fn acceptance_01_sigma_table() {
    let s = shared();
    let mut worst_gap = 0.0f64;
    let mut worst_err = 0.0f64;
    for (idx, &expected) in PUBLISHED_SIGMA.iter().enumerate() {
        let j = idx as u32 + 1;
        let got = s.report_n.sigma.value(j);
        let gap = (got.value() - expected).abs();
        worst_gap = worst_gap.max(gap);
        worst_err = worst_err.max(got.abs_error());
        assert!(
            gap <= 1e-6,
            "sigma_{j}: {} vs {expected} (gap {gap:e})",
            got.value()
        );
        assert!(
            got.abs_error() < 5e-10,
            "sigma_{j} certificate {:e} not under 5e-10",
            got.abs_error()
        );
    }
    for j in 1..13u32 {
        assert!(
            s.report_n.sigma.value(j).value() > s.report_n.sigma.value(j + 1).value(),
            "sigma must decrease strictly at j = {j}"
        );
    }
    assert!(s.report_n.sigma.value(13).value() > 0.0);
    println!(
        "acceptance 1 (sigma table): PASS — 13 entries within 1e-6 (worst gap {worst_gap:.2e}), certified error < 5e-10 (worst {worst_err:.2e}); sieve+pipeline {:.1?}+{:.1?}",
        shared().sieve_elapsed,
        shared().pipeline_elapsed
    );
}

#[test]
fn acceptance_02_s_table() {
    let s = shared();
    let mut worst = 0.0f64;
    for (idx, &expected) in PUBLISHED_S.iter().enumerate() {
        let j = idx as u32 + 1;
        let got = s.report_n.s.value(j);
        let gap = (got.value() - expected).abs();
        worst = worst.max(gap);
        assert!(
            gap <= 1e-6,
            "S_{j}: {} vs {expected} (gap {gap:e})",
            got.value()
        );
    }
    assert!(s.report_n.s.value(0).value() == 1.0);
    println!("acceptance 2 (S table): PASS — 13 entries within 1e-6 (worst gap {worst:.2e})");
}

#[test]
fn acceptance_03_window_sum() {
    let s = shared();
    let sum = s.report_n.window_sum;
    let gap = (sum.value() - PUBLISHED_WINDOW_SUM).abs();
    assert!(
        gap <= 2e-6,
        "window sum {} vs {PUBLISHED_WINDOW_SUM} (gap {gap:e})",
        sum.value()
    );

    // the standalone aggregation op reproduces the pipeline's sum
    let direct: ApproxValue =
        series::restricted_reciprocal_sum(&s.table, &construct::reproduction_window(), None)
            .unwrap();
    assert!((direct.value() - PUBLISHED_WINDOW_SUM).abs() <= 2e-6);
    assert!((direct.value() - sum.value()).abs() <= direct.abs_error() + sum.abs_error());

    println!(
        "acceptance 3 (window sum): PASS — {:.7} within 2e-6 of {PUBLISHED_WINDOW_SUM} (gap {gap:.2e})",
        sum.value()
    );
}

#[test]
fn acceptance_04_phi_ratio() {
    let s = shared();
    // phi_ratio_log succeeded inside the shared pipeline, which already
    // forces its two internal evaluation routes to agree within bounds.
    let phi = s.report_n.phi_ratio;
    assert!(
        phi.lower_bound() > PUBLISHED_PHI_BOUND,
        "phi ratio lower bound {} not above {PUBLISHED_PHI_BOUND}",
        phi.lower_bound()
    );
    // third, independent route: the direct product over the factor shape
    let shape = FactorShape::uniform_over_primes(&s.table, 14).unwrap();
    let product: ApproxValue = productfree::arith::euler_phi_ratio(&shape);
    assert!(product.lower_bound() > PUBLISHED_PHI_BOUND);
    let gap = (product.value() - phi.value()).abs();
    assert!(
        gap <= product.abs_error() + phi.abs_error(),
        "product route {} disagrees with log route {}",
        product.value(),
        phi.value()
    );
    println!(
        "acceptance 4 (phi ratio): PASS — certified {:.9} > {PUBLISHED_PHI_BOUND} (log and product routes agree within {:.1e})",
        phi.lower_bound(),
        product.abs_error() + phi.abs_error()
    );
}

#[test]
fn acceptance_05_final_density() {
    let s = shared();
    let n = &s.report_n;
    let np = &s.report_nprime;
    assert!(n.reproduction && np.reproduction);
    assert!(
        n.certified_lower > PUBLISHED_DENSITY_N,
        "N density bound {} not above {PUBLISHED_DENSITY_N}",
        n.certified_lower
    );
    assert!(
        np.certified_lower > PUBLISHED_DENSITY_NPRIME,
        "Nprime density bound {} not above {PUBLISHED_DENSITY_NPRIME}",
        np.certified_lower
    );
    assert!(np.certified_lower <= n.certified_lower);

    // size reports and the window certificate of the modulus itself
    assert!((n.digits_estimate / PUBLISHED_DIGITS_N - 1.0).abs() < 0.01);
    assert!((np.digits_estimate / PUBLISHED_DIGITS_NPRIME - 1.0).abs() < 0.01);
    let shape = FactorShape::uniform_over_primes(&s.table, 14).unwrap();
    assert!(divisor_window_set(&shape, &construct::reproduction_window()).is_ok());

    // independent route: the exponent-capped DP over the full modulus shape
    // must certify the same bound (caps of 13 are non-binding for this
    // window, so it recomputes the density without the recurrence)
    let dp: ApproxValue =
        construct::density_of_window_set(&shape, &construct::reproduction_window(), &s.table)
            .unwrap();
    assert!(
        dp.lower_bound() > PUBLISHED_DENSITY_N,
        "DP route gives {}",
        dp.lower_bound()
    );
    let gap = (dp.value() - n.density_bound.value()).abs();
    assert!(
        gap <= dp.abs_error() + n.density_bound.abs_error(),
        "DP and recurrence routes disagree: {gap:e}"
    );

    println!(
        "acceptance 5 (final density): PASS — N > {:.6} (needs {PUBLISHED_DENSITY_N}), Nprime > {:.6} (needs {PUBLISHED_DENSITY_NPRIME}), Nprime <= N; DP route agrees within {:.1e}; digits {:.3e} / {:.3e}",
        n.certified_lower, np.certified_lower, gap, n.digits_estimate, np.digits_estimate
    );
}

/// Enumeration oracle: S_j as the exact sum over multisets of j primes.
fn complete_oracle(primes: &[u64], j: u32) -> BigRational {
    fn walk(primes: &[u64], j: u32, start: usize, product: BigRational) -> BigRational {
        if j == 0 {
            return product;
        }
        let mut acc = BigRational::zero();
        for (i, &p) in primes.iter().enumerate().skip(start) {
            acc += walk(
                primes,
                j - 1,
                i,
                product.clone() / BigRational::from_integer(p.into()),
            );
        }
        acc
    }
    walk(primes, j, 0, BigRational::one())
}

#[test]
fn acceptance_06_oracle_equivalence() {
    let t0 = Instant::now();
    for subset in [
        vec![2u32],
        vec![3],
        vec![5],
        vec![2, 3],
        vec![2, 5],
        vec![3, 5],
        vec![2, 3, 5],
    ] {
        let table = primes::table_from_parts(
            subset.clone(),
            primes::Provenance::Upto(u64::from(*subset.last().unwrap())),
        );
        let sigma: SymSums<BigRational> = series::power_sums(&table, 6).unwrap();
        let s = series::complete_homogeneous(&sigma).unwrap();
        let e = series::elementary_symmetric(&sigma).unwrap();
        let members: Vec<u64> = subset.iter().map(|&p| u64::from(p)).collect();
        for j in 0..=6u32 {
            assert_eq!(
                s.value(j),
                &complete_oracle(&members, j),
                "S_{j} over {members:?}"
            );
        }
        // capped with slack caps == complete; caps of 1 == elementary
        let slack: SymSums<BigRational> =
            series::capped_sums(&table, ExponentCaps::Uniform(6), 6).unwrap();
        let square_free: SymSums<BigRational> =
            series::capped_sums(&table, ExponentCaps::Uniform(1), 6).unwrap();
        for j in 0..=6u32 {
            assert_eq!(slack.value(j), s.value(j));
            assert_eq!(square_free.value(j), e.value(j));
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:.1?}");
    println!("acceptance 6 (oracle equivalence): PASS — exact equality, {elapsed:.1?}");
}

#[test]
fn acceptance_07_series_product_consistency() {
    let table = primes::sieve_upto(100).unwrap();
    let sigma: SymSums<f64> = series::power_sums(&table, 60).unwrap();
    let s = series::complete_homogeneous(&sigma).unwrap();
    let mut failures = Vec::new();
    for z in [0.5f64, 1.0, 1.5] {
        let series_sum: f64 = (0..=60u32).map(|j| z.powi(j as i32) * s.value(j)).sum();
        let product = series::euler_product(&table, z).unwrap();
        let gap = (series_sum - product.value()).abs();
        let ok = gap <= 1e-9;
        println!(
            "acceptance 7 (series/product, z = {z}): {} — |sum_60 - product| = {gap:.3e} vs 1e-9",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failures.push((z, gap));
        }
    }
    assert!(
        failures.is_empty(),
        "series/product gap exceeds 1e-9 at {failures:?}: the degree-60 truncation tail of the geometric-pole series is larger than the stated tolerance at z = 1.5"
    );
}

#[test]
fn acceptance_08_lemma_lift_family() {
    let t0 = Instant::now();
    // canonical instance
    let lifted = lift_to_residues(&[2, 3], 216).unwrap();
    assert_eq!(lifted.len(), 60);
    assert!(is_product_free_residues(&lifted).is_pass());

    // deterministic generated family: 50 valid (n, D) pairs with n <= 10^6
    let pool: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];
    let windows = [
        OmegaWindow::single(1, 1),
        OmegaWindow::single(2, 2),
        OmegaWindow::single(2, 3),
        OmegaWindow::single(3, 4),
        OmegaWindow::single(3, 5),
        OmegaWindow::from_intervals([(3, 5), (11, 13)]),
    ];
    let mut state = 0x9e3779b97f4a7c15u64; // fixed-seed xorshift
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut built = 0usize;
    let mut largest_n = 0u64;
    let mut attempts = 0usize;
    while built < 50 {
        attempts += 1;
        assert!(attempts < 10_000, "family generator stalled");
        let k = 2 + (next() % 3) as usize; // 2..=4 primes
        let mut chosen: Vec<u64> = Vec::new();
        let mut n: u64 = 1;
        let mut shape_pairs: Vec<(u64, u32)> = Vec::new();
        for _ in 0..k {
            let p = pool[(next() % pool.len() as u64) as usize];
            if chosen.contains(&p) {
                continue;
            }
            let e = 2 + (next() % 4) as u32; // 2..=5
            let grown = (0..e).try_fold(n, |acc, _| acc.checked_mul(p).filter(|&v| v <= 1_000_000));
            if let Some(v) = grown {
                n = v;
                chosen.push(p);
                shape_pairs.push((p, e));
            }
        }
        if shape_pairs.len() < 2 {
            continue;
        }
        shape_pairs.sort_unstable();
        let shape = FactorShape::from_pairs(shape_pairs).unwrap();
        let window = &windows[(next() % windows.len() as u64) as usize];
        if u64::from(window.max().unwrap()) > shape.quotient_by_radical().big_omega() {
            continue;
        }
        let mut dcs = match divisor_window_set(&shape, window) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let divisors = dcs.materialize(100_000).unwrap().to_vec();
        if divisors.is_empty() {
            continue;
        }
        // keep the exhaustive pair check affordable
        let phi = productfree::arith::euler_phi(n).unwrap();
        let expected: u64 = divisors.iter().map(|&d| phi / d).sum();
        if expected > 3_000 {
            continue;
        }
        let lifted = lift_to_residues(&divisors, n).unwrap();
        assert_eq!(lifted.len(), expected, "n = {n}, D = {divisors:?}");
        assert!(
            is_product_free_residues(&lifted).is_pass(),
            "n = {n}, D = {divisors:?}"
        );
        // density in the exact lane agrees with the materialized count
        let table = primes::sieve_upto(17).unwrap();
        let density: BigRational =
            construct::density_of_window_set(&shape, window, &table).unwrap();
        assert_eq!(density, BigRational::new(expected.into(), n.into()));
        built += 1;
        largest_n = largest_n.max(n);
    }
    println!(
        "acceptance 8 (lemma lift): PASS — canonical 216 instance plus {built} generated pairs (largest n = {largest_n}) in {:.1?}",
        t0.elapsed()
    );
}

#[test]
fn acceptance_09_qnr_suite() {
    let cases: [(u64, u32); 7] = [(5, 1), (3, 2), (3, 3), (5, 3), (2, 3), (2, 4), (2, 5)];
    for (p, a) in cases {
        let q = qnr_set(p, a).unwrap();
        assert!(!q.degenerate);
        assert!(
            is_product_free_residues(&q.set).is_pass(),
            "{p}^{a} not product-free"
        );
        if p % 2 == 1 {
            let pa = q.set.modulus();
            assert_eq!(q.set.len(), (pa - 1) / 2, "{p}^{a} cardinality");
        }
    }
    // densities climb toward 1/2 within each prime lineage
    for (p, exps) in [
        (3u64, vec![1u32, 2, 3]),
        (5, vec![1, 2, 3]),
        (2, vec![2, 3, 4, 5]),
    ] {
        let mut last = 0.0f64;
        for a in exps {
            let q = qnr_set(p, a).unwrap();
            let density = q.set.len() as f64 / q.set.modulus() as f64;
            assert!(density > last && density < 0.5, "{p}^{a}");
            last = density;
        }
    }
    println!("acceptance 9 (quadratic nonresidue suite): PASS — 7 moduli exhaustively product-free, densities increasing toward 1/2");
}

/// Exhaustive subset oracle for D(n), same tie-break as the search.
fn exhaustive_d(n: u64) -> (u64, Vec<u64>) {
    let cands: Vec<u64> = (2..n).collect();
    let mut best_size = 0u64;
    let mut best_vector: Option<Vec<bool>> = None;
    let mut best_set = Vec::new();
    for mask in 0u64..(1 << cands.len()) {
        let chosen: Vec<u64> = cands
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &r)| r)
            .collect();
        let ok = chosen
            .iter()
            .all(|&a| chosen.iter().all(|&b| !chosen.contains(&(a * b % n))));
        if !ok {
            continue;
        }
        let size = chosen.len() as u64;
        let vector: Vec<bool> = (0..n).map(|r| chosen.contains(&r)).collect();
        let better = size > best_size
            || (size == best_size && best_vector.as_ref().map_or(true, |bv| vector < *bv));
        if better {
            best_size = size;
            best_vector = Some(vector);
            best_set = chosen;
        }
    }
    (best_size, best_set)
}

#[test]
fn acceptance_10_exact_search() {
    let t0 = Instant::now();
    for n in 1..=16u64 {
        let got = max_product_free(n).unwrap();
        let (size, set) = exhaustive_d(n);
        assert_eq!(got.best_set.len(), size, "n = {n}");
        assert_eq!(got.best_set.members(), set, "n = {n}");
    }

    let mut d_values = vec![Ratio::new(0u64, 1u64); 41];
    let mut total_nodes = 0u64;
    for n in 1..=40u64 {
        let got = max_product_free(n).unwrap();
        assert!(is_product_free_residues(&got.best_set).is_pass(), "n = {n}");
        total_nodes += got.nodes_explored;
        d_values[n as usize] = got.d_value;
        if n >= 2 {
            assert!(
                got.d_value < Ratio::new(1u64, 2u64),
                "D({n}) = {} not below 1/2",
                got.d_value
            );
        }
    }
    for m in 1..=40u64 {
        for n in 1..=40u64 {
            if m * n <= 40 {
                assert!(
                    d_values[(m * n) as usize] >= d_values[n as usize],
                    "D({}) < D({n})",
                    m * n
                );
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed < Duration::from_secs(300),
        "sweep took {elapsed:.1?}"
    );
    println!(
        "acceptance 10 (exact search): PASS — matches 2^n oracle to n = 16; D(n) < 1/2 and D(mn) >= D(n) over the n <= 40 sweep ({total_nodes} nodes, {elapsed:.1?})"
    );
}

#[test]
fn acceptance_11_general_certificates() {
    let table = primes::sieve_upto(1000).unwrap();
    let mut checked_pairs = 0usize;
    for m in 3..=12u32 {
        for x in [10u64, 100, 1000] {
            let inst: productfree::ApproxInstance =
                construct::theorem_general_instance(x, m, &table).unwrap();
            for &(k, j) in &inst.pairs {
                assert!(k > j && k + j <= m);
                if let (Some(lo), Some(hi)) = (inst.window.min(), inst.window.max()) {
                    assert!(
                        u64::from(k) * u64::from(lo) > u64::from(j) * u64::from(hi),
                        "m = {m}, x = {x}, pair ({k},{j}) vs window {}",
                        inst.window
                    );
                }
                checked_pairs += 1;
            }
        }
    }

    // Lifted hand-built instance: n = 2^12 = 4096 with window {3,4}, so
    // D = {8, 16}. Triple products of members carry 2-adic valuation in
    // [9, 12] and never exceed v_2(n) = 12, pair products stay in [6, 8]:
    // the two gcd ranges cannot meet, which the exhaustive check confirms.
    // (The exponent headroom matters: k * max(window) must stay within the
    // modulus valuation or reduction clips the gcd and the argument dies.)
    let t0 = Instant::now();
    let shape = FactorShape::from_pairs(vec![(2, 12)]).unwrap();
    let window = OmegaWindow::single(3, 4);
    let mut dcs = divisor_window_set(&shape, &window).unwrap();
    let divisors = dcs.materialize(1000).unwrap().to_vec();
    assert_eq!(divisors, vec![8, 16]);
    let lifted = lift_to_residues(&divisors, 4096).unwrap();
    assert_eq!(lifted.len(), 384); // phi(4096) * (1/8 + 1/16)
    let verdict = is_kj_product_free(
        &lifted.members(),
        3,
        2,
        SetMode::Residues(4096),
        KjSemantics::Plain,
        1_000_000_000,
    )
    .unwrap();
    assert!(
        verdict.is_pass(),
        "lifted (3,2) instance must be product-free"
    );
    println!(
        "acceptance 11 (general certificates): PASS — {checked_pairs} (k,j) pairs certified over m <= 12, x in {{10,100,1000}}; exhaustive (3,2) check on 384 residues mod 4096 in {:.1?}",
        t0.elapsed()
    );
}

/// Not a numbered criterion: the asymptotic statements are reported as
/// trends only, never asserted with constants.
#[test]
fn trend_report_main_instance() {
    let table = primes::sieve_upto(100_000).unwrap();
    let exponent = 1.0 - 0.5 * std::f64::consts::E * std::f64::consts::LN_2;
    println!("trend: x, window, density, implied C = (1 - density) * (log x)^{exponent:.6}");
    for x in [100u64, 1_000, 10_000, 100_000] {
        let inst: productfree::ApproxInstance =
            construct::theorem_main_instance(x, &table).unwrap();
        let density = inst.density.value();
        assert!((0.0..1.0).contains(&density));
        let implied_c = (1.0 - density) * (x as f64).ln().powf(exponent);
        println!(
            "trend: x = {x:>6}, window {}, density {density:.6}, implied C {implied_c:.4}",
            inst.window
        );
    }
    let d9 = max_product_free(9).unwrap();
    let witness = qnr_set(3, 2).unwrap();
    assert!(d9.d_value >= Ratio::new(witness.set.len(), 9));
    println!(
        "trend: D(9) = {} with the quadratic-nonresidue witness at 4/9",
        d9.d_value
    );
}

#[test]
fn acceptance_summary_order() {
    // force the shared pipeline early so individual criteria report quickly
    let s = shared();
    assert_eq!(s.report_n.prime_count, 10_000_000);
}
