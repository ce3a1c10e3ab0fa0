//! Prime-table cache: sieved tables are stored in the binary cache format
//! and reloaded on later runs. The directory comes from `--cache-dir`, the
//! `PRODUCTFREE_CACHE_DIR` environment variable, `~/.cache/productfree`, or
//! the system temp directory, in that order. Corrupt cache files are
//! regenerated, never trusted.

use std::path::PathBuf;

use productfree::primes::{self, PrimeTable, Provenance};
use productfree::Result;

pub struct CacheOpts {
    pub dir: Option<PathBuf>,
    pub disabled: bool,
}

impl CacheOpts {
    fn directory(&self) -> Option<PathBuf> {
        if self.disabled {
            return None;
        }
        if let Some(dir) = &self.dir {
            return Some(dir.clone());
        }
        if let Ok(dir) = std::env::var("PRODUCTFREE_CACHE_DIR") {
            if !dir.is_empty() {
                return Some(PathBuf::from(dir));
            }
        }
        if let Ok(home) = std::env::var("HOME") {
            if !home.is_empty() {
                return Some(PathBuf::from(home).join(".cache").join("productfree"));
            }
        }
        Some(std::env::temp_dir().join("productfree-cache"))
    }
}

fn cache_file(provenance: Provenance) -> String {
    match provenance {
        Provenance::FirstN(n) => format!("first_n-{n}.pfprimes"),
        Provenance::Upto(x) => format!("upto-{x}.pfprimes"),
    }
}

/// Resolve a prime table from exactly one of `--first-n` / `--upto`,
/// consulting and refreshing the cache.
pub fn resolve_primes(
    first_n: Option<u64>,
    upto: Option<u64>,
    opts: &CacheOpts,
) -> Result<PrimeTable> {
    let provenance = match (first_n, upto) {
        (Some(n), None) => Provenance::FirstN(n),
        (None, Some(x)) => Provenance::Upto(x),
        _ => {
            return Err(productfree::Error::Domain(
                "exactly one of --first-n / --upto must be given".into(),
            ))
        }
    };
    let dir = opts.directory();
    if let Some(dir) = &dir {
        let path = dir.join(cache_file(provenance));
        if path.exists() {
            match PrimeTable::load(&path) {
                Ok(table) if table.provenance() == provenance => return Ok(table),
                Ok(_) => eprintln!(
                    "warning: cache file {} holds a different table; regenerating",
                    path.display()
                ),
                Err(e) => eprintln!(
                    "warning: ignoring unreadable cache file {}: {e}",
                    path.display()
                ),
            }
        }
    }
    let table = match provenance {
        Provenance::FirstN(n) => primes::first_n_primes(n)?,
        Provenance::Upto(x) => primes::sieve_upto(x)?,
    };
    if let Some(dir) = &dir {
        let path = dir.join(cache_file(provenance));
        let saved = std::fs::create_dir_all(dir)
            .map_err(productfree::Error::from)
            .and_then(|()| table.save(&path));
        if let Err(e) = saved {
            eprintln!(
                "warning: could not write cache file {}: {e}",
                path.display()
            );
        }
    }
    Ok(table)
}
