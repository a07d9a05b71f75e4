//! Square-free `n` with `f(n) ∉ n^Z ∪ -n^Z`.

use super::{MultiplicativeMap, PowerMapError};
use crate::modular::PrimeCache;
use crate::ratfact::FactoredRational;

/// True when `value = ±n^j` for some integer `j`.
pub fn in_signed_power_orbit(n: &FactoredRational, value: &FactoredRational) -> bool {
    let Some((&q0, &e0)) = n.exponents().iter().next() else {
        return value.is_unit();
    };
    let ratio = value.ord_p(q0);
    if ratio % e0 != 0 {
        return false;
    }
    let j = ratio / e0;
    value.support().all(|q| n.ord_p(q) != 0) && n.exponents().iter().all(|(&q, &e)| value.ord_p(q) == j * e)
}

/// Exponent `j` with `f(q) = ±q^j`, if any.
fn prime_exponent(f: &MultiplicativeMap, q: u64) -> Option<i64> {
    let v = f.at_prime(q);
    let j = v.ord_p(q);
    (v.nu() == usize::from(j != 0)).then_some(j)
}

/// Single primes `q` with `f(q) ∉ ±q^Z` in increasing order, then products
/// `q1 q2` of primes with different exponents `f(q_i) = ±q_i^{j_i}`, by
/// increasing product. Fails when fewer than `count` lie below `search_limit`.
pub fn find_witness(f: &MultiplicativeMap, count: usize, search_limit: u64) -> Result<Vec<u64>, PowerMapError> {
    let primes = PrimeCache::new(search_limit);
    let mut found = Vec::with_capacity(count);
    let mut exponents = Vec::new();
    for &q in primes.primes() {
        if found.len() == count {
            return Ok(found);
        }
        match prime_exponent(f, q) {
            None => found.push(q),
            Some(j) => exponents.push((q, j)),
        }
    }
    let mut pairs = Vec::new();
    for (i, &(q1, j1)) in exponents.iter().enumerate() {
        if q1.saturating_mul(q1) > search_limit {
            break;
        }
        for &(q2, j2) in &exponents[i + 1..] {
            if q1 * q2 > search_limit {
                break;
            }
            if j1 != j2 {
                pairs.push(q1 * q2);
            }
        }
    }
    pairs.sort_unstable();
    found.extend(pairs.into_iter().take(count - found.len()));
    if found.len() < count {
        return Err(PowerMapError::Exhausted {
            found: found.len(),
            needed: count,
            limit: search_limit,
        });
    }
    Ok(found)
}
