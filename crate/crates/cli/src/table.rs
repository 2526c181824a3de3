//! Filling the cache with a table of `f_k(n)` and checking it for
//! monotonicity.

use std::collections::BTreeMap;

use anyhow::Result;
use num_bigint::BigUint;

use ulam_core::{max_anticode, SearchCap};

use crate::cache::{Cache, CacheEntry};

/// Exact values keyed by `(n, k)`.
pub type Table = BTreeMap<(u64, u64), BigUint>;

/// Looks up every `(n, k)` with `1 <= n <= n_max` and `k <= min(k_max, n)`,
/// running the search only where the cache lacks an exact entry.
pub fn fill(
    cache: &Cache,
    n_max: u64,
    k_max: u64,
    budget: u64,
    cap: SearchCap,
    source: &str,
    mut progress: impl FnMut(&CacheEntry, bool),
) -> Result<Vec<CacheEntry>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for k in 0..=k_max.min(n) {
            if let Some(entry) = cache.load(n, k)? {
                if entry.is_exact() {
                    progress(&entry, true);
                    out.push(entry);
                    continue;
                }
            }
            let report = max_anticode(n as usize, k as usize, budget, cap)?;
            let stored = cache.store(CacheEntry::from_report(&report, source))?;
            progress(&stored, false);
            out.push(stored);
        }
    }
    Ok(out)
}

pub fn exact_table(entries: &[CacheEntry]) -> Result<Table> {
    let mut table = Table::new();
    for e in entries.iter().filter(|e| e.is_exact()) {
        table.insert((e.n, e.k), e.value()?);
    }
    Ok(table)
}

/// Every failure among `f_k(n) <= f_{k+1}(n)`, `f_k(n) <= f_k(n+1)` and
/// `(n+1) f_k(n) <= f_{k+1}(n+1)`, over pairs of entries both present.
pub fn monotonicity_violations(table: &Table) -> Vec<String> {
    let mut out = Vec::new();
    for (&(n, k), f) in table {
        if let Some(g) = table.get(&(n, k + 1)) {
            if f > g {
                out.push(format!("f_{k}({n}) = {f} > f_{}({n}) = {g}", k + 1));
            }
        }
        if let Some(g) = table.get(&(n + 1, k)) {
            if f > g {
                out.push(format!("f_{k}({n}) = {f} > f_{k}({}) = {g}", n + 1));
            }
        }
        if let Some(g) = table.get(&(n + 1, k + 1)) {
            if f * (n + 1) > *g {
                out.push(format!(
                    "{} f_{k}({n}) = {} > f_{}({}) = {g}",
                    n + 1,
                    f * (n + 1),
                    k + 1,
                    n + 1
                ));
            }
        }
    }
    out
}

/// Number of relations checked by [`monotonicity_violations`].
pub fn monotonicity_relations(table: &Table) -> usize {
    table
        .keys()
        .map(|&(n, k)| {
            [(n, k + 1), (n + 1, k), (n + 1, k + 1)]
                .iter()
                .filter(|key| table.contains_key(key))
                .count()
        })
        .sum()
}

pub fn csv_header() -> &'static str {
    "n,k,value,status,elapsed_ms,created_at"
}

pub fn csv_row(e: &CacheEntry) -> String {
    format!(
        "{},{},{},{},{},{}",
        e.n, e.k, e.value, e.status, e.elapsed_ms, e.created_at
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(u64, u64, u64)]) -> Table {
        rows.iter()
            .map(|&(n, k, f)| ((n, k), BigUint::from(f)))
            .collect()
    }

    #[test]
    fn known_values_are_monotone() {
        let t = table(&[(2, 0, 1), (2, 1, 2), (3, 0, 1), (3, 1, 3), (3, 2, 6)]);
        assert!(monotonicity_violations(&t).is_empty());
        assert_eq!(monotonicity_relations(&t), 3 + 2 + 1 + 1);
    }

    #[test]
    fn violations_are_reported() {
        let t = table(&[(3, 1, 3), (4, 2, 11)]);
        assert_eq!(monotonicity_violations(&t).len(), 1);
        let t = table(&[(3, 1, 4), (3, 2, 3)]);
        assert_eq!(monotonicity_violations(&t).len(), 1);
    }

    #[test]
    fn fill_resumes_from_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let mut fresh = 0;
        let first = fill(
            &cache,
            3,
            3,
            1_000_000,
            SearchCap::Standard,
            "test",
            |_, hit| fresh += usize::from(!hit),
        )
        .unwrap();
        assert_eq!(fresh, 9);
        let values: Vec<&str> = first.iter().map(|e| e.value.as_str()).collect();
        assert_eq!(values, ["1", "1", "1", "2", "2", "1", "3", "6", "6"]);
        let mut hits = 0;
        fill(
            &cache,
            3,
            3,
            1_000_000,
            SearchCap::Standard,
            "test",
            |_, hit| hits += usize::from(hit),
        )
        .unwrap();
        assert_eq!(hits, 9);
    }
}
