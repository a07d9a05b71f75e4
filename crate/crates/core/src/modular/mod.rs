//! Word-sized modular arithmetic over prime moduli.
//!
//! Everything here works on `u64` residues with `u128` intermediates. The
//! moduli of interest are primes below `2^63`; scans in practice stay far
//! below `10^10`.

mod dlog;
mod sieve;

pub use dlog::{discrete_log, DiscreteLog};
pub use sieve::{count_primes, PrimeCache};

use serde::Serialize;
use thiserror::Error;

use crate::ratfact::{FactoredRational, RatError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModularError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{h} is not a unit modulo {p}")]
    NotAUnit { h: u64, p: u64 },
    #[error("{g} does not generate the multiplicative group modulo {p}")]
    NotAGenerator { g: u64, p: u64 },
    #[error("no discrete logarithm of {h} to base {g} modulo {p}")]
    NoLogarithm { g: u64, h: u64, p: u64 },
    #[error("ell must be an odd prime, got {0}")]
    BadEll(u64),
    #[error("p = {p} is not congruent to 1 modulo ell = {ell}")]
    NotOneModEll { p: u64, ell: u64 },
    #[error("p must differ from ell (both {0})")]
    PEqualsEll(u64),
    #[error(transparent)]
    Rational(#[from] RatError),
    #[error("congruence sequences differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("cofactor {cofactor} of {n} is composite and has no factor below {bound}")]
    Unfactorable { n: u64, cofactor: u64, bound: u64 },
    #[error("prime cache covers primes up to {limit}, but {needed} is required")]
    CacheTooSmall { limit: u64, needed: u64 },
    #[error("prime cache file: {0}")]
    CacheFormat(String),
    #[error("prime cache i/o: {0}")]
    Io(String),
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    result
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller–Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Default trial-division bound used when factoring library inputs.
pub const DEFAULT_TRIAL_BOUND: u64 = 1 << 20;

/// Factors `n` by trial division up to `bound`; a leftover cofactor must be
/// prime (checked deterministically) or the input is rejected.
pub fn factor_u64(n: u64, bound: u64) -> Result<Vec<(u64, u32)>, ModularError> {
    let mut out = Vec::new();
    if n <= 1 {
        return Ok(out);
    }
    let mut rest = n;
    let mut push = |d: u64, rest: &mut u64| {
        let mut e = 0;
        while *rest % d == 0 {
            *rest /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
    };
    push(2, &mut rest);
    let mut d = 3u64;
    while d <= bound && d.saturating_mul(d) <= rest {
        if rest % d == 0 {
            push(d, &mut rest);
        }
        d += 2;
    }
    if rest > 1 {
        if d.saturating_mul(d) > rest || is_prime(rest) {
            out.push((rest, 1));
        } else {
            return Err(ModularError::Unfactorable {
                n,
                cofactor: rest,
                bound,
            });
        }
    }
    Ok(out)
}

/// Smallest generator of `(Z/pZ)^×`; `1` for `p = 2`.
pub fn primitive_root(p: u64) -> Result<u64, ModularError> {
    if !is_prime(p) {
        return Err(ModularError::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let factors = factor_u64(p - 1, DEFAULT_TRIAL_BOUND)?;
    Ok(primitive_root_with(p, &factors))
}

pub(crate) fn primitive_root_with(p: u64, factors_of_order: &[(u64, u32)]) -> u64 {
    if p == 2 {
        return 1;
    }
    (2..p)
        .find(|&g| factors_of_order.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("a prime modulus always has a primitive root")
}

/// Multiplicative order of `a` modulo prime `p`, given the factorization of `p - 1`.
pub fn multiplicative_order(a: u64, p: u64, factors_of_order: &[(u64, u32)]) -> u64 {
    let mut order = p - 1;
    for &(q, _) in factors_of_order {
        while order % q == 0 && pow_mod(a, order / q, p) == 1 {
            order /= q;
        }
    }
    order
}

/// Residue class of `c` in `F_p^× / (F_p^×)^ℓ`, represented by the
/// ℓ-th root of unity `c^((p-1)/ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PowerClass {
    pub z: u64,
    pub splits_completely: bool,
}

pub(crate) fn check_odd_prime_ell(ell: u64) -> Result<(), ModularError> {
    if ell == 2 || !is_prime(ell) {
        return Err(ModularError::BadEll(ell));
    }
    Ok(())
}

pub(crate) fn check_split_prime(p: u64, ell: u64) -> Result<(), ModularError> {
    check_odd_prime_ell(ell)?;
    if p == ell {
        return Err(ModularError::PEqualsEll(p));
    }
    if !is_prime(p) {
        return Err(ModularError::NotPrime(p));
    }
    if p % ell != 1 {
        return Err(ModularError::NotOneModEll { p, ell });
    }
    Ok(())
}

/// `z_c = c^((p-1)/ℓ) mod p`. The prime `p` splits completely in
/// `Q(ζ_ℓ, c^{1/ℓ})` exactly when `z_c = 1`.
pub fn ell_power_class(c: &FactoredRational, ell: u64, p: u64) -> Result<PowerClass, ModularError> {
    check_split_prime(p, ell)?;
    let residue = c.reduce_mod_p(p)?;
    let z = pow_mod(residue, (p - 1) / ell, p);
    Ok(PowerClass {
        z,
        splits_completely: z == 1,
    })
}

/// Smallest `k` in `[0, m)` with `k·a_i ≡ b_i (mod m)` for every `i`, or
/// `None` when the system is inconsistent.
pub fn solve_power_congruences(a: &[u64], b: &[u64], m: u64) -> Result<Option<u64>, ModularError> {
    if a.len() != b.len() {
        return Err(ModularError::LengthMismatch { a: a.len(), b: b.len() });
    }
    if m == 0 {
        return Err(ModularError::ZeroModulus);
    }
    // running solution set: k ≡ residue (mod modulus), modulus | m
    let (mut residue, mut modulus) = (0u64, 1u64);
    for (&ai, &bi) in a.iter().zip(b) {
        let (ai, bi) = (ai % m, bi % m);
        let g = gcd(ai, m);
        if bi % g != 0 {
            return Ok(None);
        }
        let n = m / g;
        let s = if n == 1 {
            0
        } else {
            let inv = inv_mod((ai / g) % n, n).expect("coprime after dividing out the gcd");
            mul_mod((bi / g) % n, inv, n)
        };
        match merge_congruence(residue, modulus, s, n) {
            Some((r, l)) => {
                residue = r;
                modulus = l;
            }
            None => return Ok(None),
        }
    }
    Ok(Some(residue))
}

// Intersects k ≡ r1 (mod m1) with k ≡ r2 (mod m2) for possibly non-coprime moduli.
fn merge_congruence(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    let g = gcd(m1, m2);
    let diff = (r2 as i128 - r1 as i128).rem_euclid(m2 as i128) as u64;
    if diff % g != 0 {
        return None;
    }
    let m2g = m2 / g;
    let t = if m2g == 1 {
        0
    } else {
        let inv = inv_mod((m1 / g) % m2g, m2g).expect("coprime after dividing out the gcd");
        mul_mod((diff / g) % m2g, inv, m2g)
    };
    let lcm = m1 as u128 * m2g as u128;
    let r = (r1 as u128 + m1 as u128 * t as u128) % lcm;
    Some((r as u64, lcm as u64))
}
