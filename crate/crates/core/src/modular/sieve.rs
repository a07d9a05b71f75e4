//! Segmented sieve and the persisted prime cache.
//!
//! Cache file layout: a header line `PRIMECACHE v1 <limit>` followed by one
//! decimal prime per line, ascending.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::ModularError;

const SEGMENT_ODDS: usize = 1 << 17;
const HEADER: &str = "PRIMECACHE v1";

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

fn small_odd_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

/// Calls `emit` on every prime `≤ limit` in increasing order.
fn sieve_segmented(limit: u64, mut emit: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    emit(2);
    let base = small_odd_primes(isqrt(limit));
    let mut next: Vec<u64> = base.iter().map(|&p| p * p).collect();
    let mut segment = vec![true; SEGMENT_ODDS];
    let mut low = 3u64;
    while low <= limit {
        // slot i holds low + 2i
        let len = (((limit - low) / 2 + 1) as usize).min(SEGMENT_ODDS);
        let high = low + 2 * (len as u64 - 1);
        segment[..len].fill(true);
        for (j, &p) in base.iter().enumerate() {
            let mut m = next[j];
            while m <= high {
                segment[((m - low) / 2) as usize] = false;
                m += 2 * p;
            }
            next[j] = m;
        }
        for (i, &is_p) in segment[..len].iter().enumerate() {
            if is_p {
                emit(low + 2 * i as u64);
            }
        }
        low = high + 2;
    }
}

/// π(limit) without storing the primes.
pub fn count_primes(limit: u64) -> u64 {
    let mut count = 0;
    sieve_segmented(limit, |_| count += 1);
    count
}

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCache {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeCache {
    pub fn new(limit: u64) -> Self {
        let mut primes = Vec::with_capacity(estimate_pi(limit));
        sieve_segmented(limit, |p| primes.push(p));
        Self { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn primes_up_to(&self, x: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= x);
        &self.primes[..end]
    }

    /// Primes in the closed interval `[lo, hi]`.
    pub fn primes_in(&self, lo: u64, hi: u64) -> &[u64] {
        let start = self.primes.partition_point(|&p| p < lo);
        let end = self.primes.partition_point(|&p| p <= hi);
        &self.primes[start..end.max(start)]
    }

    /// π(x); `x` must be covered by the cache.
    pub fn pi(&self, x: u64) -> Result<u64, ModularError> {
        self.ensure(x)?;
        Ok(self.primes_up_to(x).len() as u64)
    }

    pub fn ensure(&self, needed: u64) -> Result<(), ModularError> {
        if needed > self.limit {
            return Err(ModularError::CacheTooSmall {
                limit: self.limit,
                needed,
            });
        }
        Ok(())
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    pub fn save(&self, path: &Path) -> Result<(), ModularError> {
        let io = |e: std::io::Error| ModularError::Io(e.to_string());
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        writeln!(out, "{HEADER} {}", self.limit).map_err(io)?;
        for p in &self.primes {
            writeln!(out, "{p}").map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, ModularError> {
        let io = |e: std::io::Error| ModularError::Io(e.to_string());
        let bad = |msg: String| ModularError::CacheFormat(msg);
        let reader = BufReader::new(File::open(path).map_err(io)?);
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?.map_err(io)?;
        let limit = header
            .strip_prefix(HEADER)
            .and_then(|rest| rest.trim().parse::<u64>().ok())
            .ok_or_else(|| bad(format!("bad header line {header:?}")))?;
        let mut primes = Vec::with_capacity(estimate_pi(limit));
        for (i, line) in lines.enumerate() {
            let line = line.map_err(io)?;
            let p: u64 = line
                .trim()
                .parse()
                .map_err(|_| bad(format!("line {}: not an integer: {line:?}", i + 2)))?;
            if primes.last().is_some_and(|&last| last >= p) {
                return Err(bad(format!("line {}: not strictly increasing", i + 2)));
            }
            if p > limit {
                return Err(bad(format!("line {}: {p} exceeds the limit {limit}", i + 2)));
            }
            primes.push(p);
        }
        let cache = Self { limit, primes };
        // spot check the head against a fresh sieve
        let head = limit.min(10_000);
        if cache.primes_up_to(head) != PrimeCache::new(head).primes() {
            return Err(bad(format!("primes up to {head} do not match a fresh sieve")));
        }
        Ok(cache)
    }

    /// Reuses the cache at `path` when it covers `limit`; otherwise sieves
    /// and rewrites the file.
    pub fn load_or_build(path: &Path, limit: u64) -> Result<Self, ModularError> {
        if path.exists() {
            let cached = Self::load(path)?;
            if cached.limit >= limit {
                return Ok(cached);
            }
        }
        let fresh = Self::new(limit);
        fresh.save(path)?;
        Ok(fresh)
    }
}

fn estimate_pi(limit: u64) -> usize {
    if limit < 10 {
        return 4;
    }
    let x = limit as f64;
    (1.26 * x / x.ln()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::is_prime;

    #[test]
    fn matches_primality_test_across_segment_boundaries() {
        for limit in [0u64, 1, 2, 3, 4, 10, 100, 262_143, 262_144, 262_145, 600_000] {
            let cache = PrimeCache::new(limit);
            let expected: Vec<u64> = (0..=limit).filter(|&n| is_prime(n)).collect();
            assert_eq!(cache.primes(), expected.as_slice(), "limit {limit}");
        }
    }

    #[test]
    fn known_prime_counts() {
        assert_eq!(count_primes(100), 25);
        assert_eq!(count_primes(1_000_000), 78_498);
        assert_eq!(PrimeCache::new(10_000_000).primes().len(), 664_579);
    }

    #[test]
    fn range_queries() {
        let cache = PrimeCache::new(100);
        assert_eq!(cache.primes_in(10, 20), &[11, 13, 17, 19]);
        assert_eq!(cache.primes_in(20, 10), &[] as &[u64]);
        assert_eq!(cache.pi(100).unwrap(), 25);
        assert!(matches!(
            cache.pi(101),
            Err(ModularError::CacheTooSmall {
                limit: 100,
                needed: 101
            })
        ));
    }

    #[test]
    fn persistence_round_trip_and_reuse() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("primes.txt");
        let built = PrimeCache::load_or_build(&path, 50_000).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("PRIMECACHE v1 50000\n2\n3\n5\n"));
        assert_eq!(PrimeCache::load(&path).unwrap(), built);
        // a smaller request reuses the larger file
        let reused = PrimeCache::load_or_build(&path, 1_000).unwrap();
        assert_eq!(reused.limit(), 50_000);
        // a larger request rebuilds it
        let grown = PrimeCache::load_or_build(&path, 60_000).unwrap();
        assert_eq!(PrimeCache::load(&path).unwrap(), grown);
    }

    #[test]
    fn rejects_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "PRIMECACHE v2 10\n2\n").unwrap();
        assert!(matches!(PrimeCache::load(&path), Err(ModularError::CacheFormat(_))));
        std::fs::write(&path, "PRIMECACHE v1 10\n2\n5\n3\n").unwrap();
        assert!(matches!(PrimeCache::load(&path), Err(ModularError::CacheFormat(_))));
        std::fs::write(&path, "PRIMECACHE v1 10\n2\n3\n7\n").unwrap();
        assert!(matches!(PrimeCache::load(&path), Err(ModularError::CacheFormat(_))));
    }
}
