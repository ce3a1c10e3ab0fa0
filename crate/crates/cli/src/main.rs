//! Command-line interface: reproduction pipelines, constructions,
//! verification, and exact search, with machine-readable output.
//!
//! Exit codes: 0 = ok / property holds; 1 = mathematical counterexample or
//! failed reproduction; 2 = usage or configuration error; 3 = resource or
//! budget limit.

mod cache;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use productfree::arith::{self, FactorShape, OmegaWindow};
use productfree::construct::{self, Variant};
use productfree::primes::PrimeTable;
use productfree::series::{self, SymSums};
use productfree::verify::{self, KjSemantics, SetMode, Verdict};
use productfree::{ApproxValue, Error, JsonScalar, Rational, Result, Scalar};

use cache::{resolve_primes, CacheOpts};

#[derive(Parser)]
#[command(
    name = "productfree",
    version,
    about = "Product-free residue sets: constructions, certified densities, verification, exact search"
)]
struct Cli {
    /// Worker threads for sieving and summation (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PrimeSource {
    /// Use the first N primes
    #[arg(long, value_name = "N", conflicts_with = "upto")]
    first_n: Option<u64>,

    /// Use all primes <= X
    #[arg(long, value_name = "X")]
    upto: Option<u64>,
}

#[derive(Args)]
struct CacheArgs {
    /// Directory for the prime-table cache (default: $PRODUCTFREE_CACHE_DIR,
    /// then ~/.cache/productfree)
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Neither read nor write the prime-table cache
    #[arg(long)]
    no_cache: bool,
}

impl CacheArgs {
    fn opts(&self) -> CacheOpts {
        CacheOpts {
            dir: self.cache_dir.clone(),
            disabled: self.no_cache,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct SetInput {
    /// Comma-separated members, e.g. "2,5,6,8"
    #[arg(long, value_name = "LIST", conflicts_with = "file")]
    set: Option<String>,

    /// File with one integer per line
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Reciprocal power sums sigma_j and the derived sums S_j
    Sigma {
        #[command(flatten)]
        source: PrimeSource,
        /// Largest index j to compute
        #[arg(long, default_value_t = 13)]
        jmax: u32,
        /// Exact rational arithmetic (small prime sets only)
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        cache: CacheArgs,
    },

    /// The large certified-density run (variant N or Nprime)
    Example {
        /// N (uniform 14th powers) or Nprime (exponent 2 above 10^6)
        #[arg(long, default_value = "N")]
        variant: String,
        /// Prime count; anything other than 10000000 is a non-reproduction run
        #[arg(long, default_value_t = construct::REPRODUCTION_PRIME_COUNT)]
        first_n: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        cache: CacheArgs,
    },

    /// Exact maximum product-free subset of Z/nZ by branch and bound
    Brute {
        #[arg(long)]
        n: u64,
        /// Largest modulus the search accepts
        #[arg(long, default_value_t = verify::DEFAULT_SEARCH_LIMIT)]
        limit: u64,
    },

    /// Product-freeness checks; with --k/--j the (k,j) generalization
    Verify {
        #[command(flatten)]
        input: SetInput,
        /// Check residues modulo M (omit for integer semantics)
        #[arg(long, value_name = "M")]
        modulus: Option<u64>,
        #[arg(long, requires = "j")]
        k: Option<u32>,
        #[arg(long, requires = "k")]
        j: Option<u32>,
        /// For k = j: only count solutions with genuinely different multisets
        #[arg(long)]
        multiset: bool,
        /// Cap on product evaluations
        #[arg(long, default_value_t = verify::DEFAULT_KJ_BUDGET)]
        budget: u64,
    },

    /// Counting bound |S(x)| <= x - floor(x/a)/2 for a product-free integer set
    Upper {
        #[command(flatten)]
        input: SetInput,
        #[arg(long)]
        x: u64,
    },

    /// Build product-free objects
    Construct {
        #[command(subcommand)]
        what: ConstructCmd,
    },

    /// Generate, cache, and export prime tables
    Primes {
        #[command(flatten)]
        source: PrimeSource,
        /// Write the table in the binary cache format
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Export as CSV, one prime per line
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        #[command(flatten)]
        cache: CacheArgs,
    },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Powers of p times quadratic nonresidues: a product-free set mod p^a
    Qnr {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u32,
    },

    /// Resolve real omega bounds to an integer window
    Window {
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        /// Keep integers strictly between the bounds
        #[arg(long, conflicts_with = "inclusive")]
        strict: bool,
        /// Keep integers within the closed interval
        #[arg(long)]
        inclusive: bool,
    },

    /// Validate a divisor window against a modulus shape and certify it
    DivisorWindow {
        /// Explicit modulus to factor
        #[arg(long, conflicts_with = "shape")]
        n: Option<u64>,
        /// Factor shape, e.g. "2^3,3^3"
        #[arg(long, value_name = "SHAPE")]
        shape: Option<String>,
        /// Window, e.g. "3-5,11-13"
        #[arg(long, value_name = "W")]
        window: String,
        /// Also list the divisors (up to CAP of them)
        #[arg(long, value_name = "CAP")]
        materialize: Option<usize>,
    },

    /// Lift a product-free divisor set to residues mod n
    Lift {
        #[arg(long)]
        n: u64,
        /// Comma-separated divisors of n/rad(n), e.g. "2,3"
        #[arg(long, value_name = "LIST")]
        divisors: String,
    },

    /// Window instance with modulus lcm(1..=x)^2
    TheoremMain {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        cache: CacheArgs,
    },

    /// Simultaneous (k,j) window instance with modulus lcm(1..=x)^m
    TheoremGeneral {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        cache: CacheArgs,
    },

    /// Double-exponential lower bound for the density of good moduli
    Delta {
        #[arg(long)]
        u: f64,
        #[arg(long)]
        c: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource { .. } | Error::Budget { .. } | Error::Overflow(_) => 3,
        Error::WindowNotSumFree { .. } | Error::Precondition(_) | Error::Inconsistency(_) => 1,
        Error::Domain(_) | Error::Format { .. } | Error::Io(_) => 2,
    }
}

fn emit(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Sigma {
            source,
            jmax,
            exact,
            format,
            cache,
        } => {
            let table = resolve_primes(source.first_n, source.upto, &cache.opts())?;
            if exact {
                let sigma: SymSums<Rational> = series::power_sums(&table, jmax)?;
                let s = series::complete_homogeneous(&sigma)?;
                cmd_sigma_output(&table, &sigma, &s, format);
            } else {
                let sigma: SymSums<ApproxValue> = series::power_sums(&table, jmax)?;
                let s = series::complete_homogeneous(&sigma)?;
                cmd_sigma_output(&table, &sigma, &s, format);
            }
            Ok(0)
        }

        Command::Example {
            variant,
            first_n,
            format,
            cache,
        } => {
            let variant: Variant = variant.parse()?;
            let table = resolve_primes(Some(first_n), None, &cache.opts())?;
            let report = construct::run_example(&table, variant)?;
            match format {
                Format::Table => print!("{}", report.render_table()),
                _ => emit(&report.to_json()),
            }
            if report.reproduction && report.certified_lower <= variant.reproduction_threshold() {
                eprintln!(
                    "reproduction failed: certified lower bound {} does not exceed {}",
                    report.certified_lower,
                    variant.reproduction_threshold()
                );
                return Ok(1);
            }
            if !report.reproduction {
                eprintln!(
                    "note: non-reproduction run ({} primes); the published bounds apply to {}",
                    report.prime_count,
                    construct::REPRODUCTION_PRIME_COUNT
                );
            }
            Ok(0)
        }

        Command::Brute { n, limit } => {
            let result = verify::max_product_free_with_limit(n, limit)?;
            emit(&result.to_json());
            Ok(0)
        }

        Command::Verify {
            input,
            modulus,
            k,
            j,
            multiset,
            budget,
        } => {
            let members = parse_set_input(&input)?;
            let verdict = match (k, j) {
                (Some(k), Some(j)) => {
                    let mode = match modulus {
                        Some(n) => SetMode::Residues(n),
                        None => SetMode::Integers,
                    };
                    let semantics = if multiset {
                        KjSemantics::Multiset
                    } else {
                        KjSemantics::Plain
                    };
                    verify::is_kj_product_free(&members, k, j, mode, semantics, budget)?
                }
                (None, None) => match modulus {
                    Some(n) => {
                        let set = construct::ResidueSet::from_members(n, members.iter().copied())?;
                        verify::is_product_free_residues(&set)
                    }
                    None => verify::is_product_free_integers(&members)?,
                },
                _ => unreachable!("clap enforces k and j together"),
            };
            let check = match (k, j) {
                (Some(k), Some(j)) => format!("({k},{j})-product-free"),
                _ => "product-free".to_string(),
            };
            match verdict {
                Verdict::Pass => {
                    emit(&serde_json::json!({
                        "ok": true,
                        "check": check,
                        "modulus": modulus,
                        "size": members.len(),
                    }));
                    Ok(0)
                }
                Verdict::Fail(cex) => {
                    emit(&serde_json::json!({
                        "ok": false,
                        "check": check,
                        "modulus": modulus,
                        "size": members.len(),
                        "counterexample": cex.to_json(),
                    }));
                    Ok(1)
                }
            }
        }

        Command::Upper { input, x } => {
            let members = parse_set_input(&input)?;
            let report = verify::upper_density_bound_check(&members, x)?;
            let pass = report.pass;
            emit(&report.to_json());
            Ok(if pass { 0 } else { 1 })
        }

        Command::Construct { what } => run_construct(what),

        Command::Primes {
            source,
            out,
            csv,
            cache,
        } => {
            let table = resolve_primes(source.first_n, source.upto, &cache.opts())?;
            if let Some(path) = out {
                table.save(&path)?;
            }
            if let Some(path) = csv {
                let file = std::fs::File::create(path)?;
                table.write_csv(std::io::BufWriter::new(file))?;
            }
            emit(&table.descriptor_json());
            Ok(0)
        }
    }
}

fn run_construct(cmd: ConstructCmd) -> Result<i32> {
    match cmd {
        ConstructCmd::Qnr { p, a } => {
            let qnr = construct::qnr_set(p, a)?;
            let mut value = qnr.set.to_json();
            value["p"] = serde_json::json!(p);
            value["a"] = serde_json::json!(a);
            value["degenerate"] = serde_json::json!(qnr.degenerate);
            emit(&value);
            Ok(0)
        }

        ConstructCmd::Window {
            lo,
            hi,
            strict,
            inclusive,
        } => {
            if strict == inclusive {
                return Err(Error::Domain(
                    "pass exactly one of --strict / --inclusive".into(),
                ));
            }
            let window = arith::resolve_window(lo, hi, strict)?;
            emit(&serde_json::json!({
                "lo": lo,
                "hi": hi,
                "strict": strict,
                "window": window.to_json(),
                "empty": window.is_empty(),
            }));
            Ok(0)
        }

        ConstructCmd::DivisorWindow {
            n,
            shape,
            window,
            materialize,
        } => {
            let shape = match (n, shape) {
                (Some(n), None) => FactorShape::factor(n)?,
                (None, Some(s)) => parse_shape(&s)?,
                _ => return Err(Error::Domain("pass exactly one of --n / --shape".into())),
            };
            let window = parse_window(&window)?;
            let mut set = construct::divisor_window_set(&shape, &window)?;
            if let Some(cap) = materialize {
                set.materialize(cap)?;
            }
            let mut value = set.to_json();
            value["sum_free_certified"] = serde_json::json!(true);
            emit(&value);
            Ok(0)
        }

        ConstructCmd::Lift { n, divisors } => {
            let divisors = parse_u64_list(&divisors)?;
            let lifted = construct::lift_to_residues(&divisors, n)?;
            emit(&lifted.to_json());
            Ok(0)
        }

        ConstructCmd::TheoremMain { x, exact, cache } => {
            let table = resolve_primes(None, Some(x), &cache.opts())?;
            if exact {
                let inst: construct::TheoremInstance<Rational> =
                    construct::theorem_main_instance(x, &table)?;
                emit(&inst.to_json());
            } else {
                let inst: construct::TheoremInstance<ApproxValue> =
                    construct::theorem_main_instance(x, &table)?;
                emit(&inst.to_json());
            }
            Ok(0)
        }

        ConstructCmd::TheoremGeneral { x, m, exact, cache } => {
            let table = resolve_primes(None, Some(x), &cache.opts())?;
            if exact {
                let inst: construct::TheoremInstance<Rational> =
                    construct::theorem_general_instance(x, m, &table)?;
                emit(&inst.to_json());
            } else {
                let inst: construct::TheoremInstance<ApproxValue> =
                    construct::theorem_general_instance(x, m, &table)?;
                emit(&inst.to_json());
            }
            Ok(0)
        }

        ConstructCmd::Delta { u, c } => {
            let bound = construct::delta_lower_bound(u, c)?;
            emit(&serde_json::json!({
                "u": u,
                "C": c,
                "alpha0": bound.alpha0,
                "value": bound.value,
                "underflow": bound.underflow,
            }));
            Ok(0)
        }
    }
}

fn cmd_sigma_output<S: Scalar + JsonScalar>(
    table: &PrimeTable,
    sigma: &SymSums<S>,
    s: &SymSums<S>,
    format: Format,
) {
    match format {
        Format::Json => emit(&serde_json::json!({
            "provenance": table.provenance().to_json(),
            "prime_count": table.len(),
            "jmax": sigma.j_max(),
            "mode": S::mode_name(),
            "sigma": sigma.to_json(),
            "s": s.to_json(),
        })),
        Format::Csv => {
            println!("j,sigma_j,s_j");
            for j in 1..=sigma.j_max() {
                println!(
                    "{j},{:.6},{:.6}",
                    sigma.value(j).to_f64_lossy(),
                    s.value(j).to_f64_lossy()
                );
            }
        }
        Format::Table => {
            println!("{:>4} {:>13} {:>13}", "j", "sigma_j", "S_j");
            for j in 1..=sigma.j_max() {
                println!(
                    "{:>4} {:>13.6} {:>13.6}",
                    j,
                    sigma.value(j).to_f64_lossy(),
                    s.value(j).to_f64_lossy()
                );
            }
        }
    }
}

fn parse_set_input(input: &SetInput) -> Result<Vec<u64>> {
    match (&input.set, &input.file) {
        (Some(list), None) => parse_u64_list(list),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let mut members = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                members.push(line.parse::<u64>().map_err(|_| {
                    Error::Domain(format!("line {}: {line:?} is not an integer", lineno + 1))
                })?);
            }
            Ok(members)
        }
        _ => Err(Error::Domain("pass exactly one of --set / --file".into())),
    }
}

fn parse_u64_list(list: &str) -> Result<Vec<u64>> {
    list.split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.parse::<u64>()
                .map_err(|_| Error::Domain(format!("{part:?} is not an integer")))
        })
        .collect()
}

/// "3-5,11-13" (also "3..5" or single values) into a window.
fn parse_window(text: &str) -> Result<OmegaWindow> {
    let mut intervals = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = if let Some((a, b)) = part.split_once("..") {
            (a, b)
        } else if let Some((a, b)) = part.split_once('-') {
            (a, b)
        } else {
            (part, part)
        };
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad window bound {lo:?}")))?;
        let hi: u32 = hi
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad window bound {hi:?}")))?;
        if lo > hi {
            return Err(Error::Domain(format!("window interval {part:?} is empty")));
        }
        intervals.push((lo, hi));
    }
    if intervals.is_empty() {
        return Err(Error::Domain(
            "window must contain at least one interval".into(),
        ));
    }
    Ok(OmegaWindow::from_intervals(intervals))
}

/// "2^3,3^2" (also "2:3" or bare primes) into a factor shape.
fn parse_shape(text: &str) -> Result<FactorShape> {
    let mut pairs = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (p, e) = if let Some((p, e)) = part.split_once('^') {
            (p, e)
        } else if let Some((p, e)) = part.split_once(':') {
            (p, e)
        } else {
            (part, "1")
        };
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad prime {p:?}")))?;
        let e: u32 = e
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad exponent {e:?}")))?;
        pairs.push((p, e));
    }
    pairs.sort_unstable();
    FactorShape::from_pairs(pairs)
}
