//! Brute-force oracles and random instances shared by the invariant tests
//! and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;

use localpower::chebotarev::{self, in_c4};
use localpower::lattice::f_invariants;
use localpower::powermap::{local_exponent, DecisionMode, Membership, MultiplicativeMap};
use localpower::ratfact::FactoredRational;
use proptest::prelude::*;

pub fn primes_upto(n: u64) -> Vec<u64> {
    let mut composite = vec![false; n as usize + 1];
    let mut out = Vec::new();
    for i in 2..=n as usize {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n as usize {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let (mut acc, mut b) = (1u128 % m as u128, base as u128 % m as u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// `num/den mod p` via Fermat inversion.
pub fn residue(num: i64, den: i64, p: u64) -> u64 {
    let r = |x: i64| x.rem_euclid(p as i64) as u64;
    r(num) * pow_mod(r(den), p - 2, p) % p
}

/// `c^{(p-1)/ℓ} mod p` straight from the definition.
pub fn z_oracle(num: i64, den: i64, p: u64, ell: u64) -> u64 {
    pow_mod(residue(num, den, p), (p - 1) / ell, p)
}

const ELLS: [u64; 5] = [3, 5, 7, 11, 13];
const PRIME_BOUND: u64 = 20_000;

fn split_primes(ell: u64) -> Vec<u64> {
    primes_upto(PRIME_BOUND).into_iter().filter(|p| p % ell == 1).collect()
}

#[derive(Debug, Clone)]
pub struct TransportCase {
    pub p: u64,
    pub ell: u64,
    pub num: i64,
    pub den: i64,
    pub k: i64,
}

pub fn transport_case() -> impl Strategy<Value = TransportCase> {
    (
        0..ELLS.len(),
        any::<prop::sample::Index>(),
        1i64..5000,
        1i64..5000,
        any::<bool>(),
        -60i64..60,
    )
        .prop_filter_map("p divides c", |(e, idx, num, den, neg, k)| {
            let ell = ELLS[e];
            let primes = split_primes(ell);
            let p = primes[idx.index(primes.len())];
            if num as u64 % p == 0 || den as u64 % p == 0 {
                return None;
            }
            let num = if neg { -num } else { num };
            Some(TransportCase { p, ell, num, den, k })
        })
}

/// `z_{c^k} = z_c^k`, with `z_c` also checked against the definition.
pub fn check_transport(t: &TransportCase) -> Result<(), String> {
    let c = FactoredRational::factor(t.num, t.den).map_err(|e| e.to_string())?;
    let z = chebotarev::z_vector(t.p, t.ell, std::slice::from_ref(&c)).map_err(|e| e.to_string())?;
    let zk = chebotarev::z_vector(t.p, t.ell, &[c.pow(t.k)]).map_err(|e| e.to_string())?;
    let oracle = z_oracle(t.num, t.den, t.p, t.ell);
    if z[0] != oracle {
        return Err(format!("{t:?}: z_c = {} but c^((p-1)/l) = {oracle}", z[0]));
    }
    let expected = pow_mod(z[0], t.k.rem_euclid((t.p - 1) as i64) as u64, t.p);
    if zk[0] != expected {
        return Err(format!("{t:?}: z_(c^k) = {} but z_c^k = {expected}", zk[0]));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct LocalPowerCase {
    pub ell: u64,
    pub p: u64,
    pub k: u64,
    /// `(q, s)`: `f(q)` is the lift `(q^k mod p) + s p`.
    pub overrides: Vec<(u64, u64)>,
    pub n1: u64,
    pub n2: u64,
}

pub fn local_power_case() -> impl Strategy<Value = LocalPowerCase> {
    (
        0..ELLS.len(),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
        prop::collection::btree_map(prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), 0u64..4, 0..4),
        2u64..60,
        2u64..60,
    )
        .prop_filter_map("override at p", |(e, pi, ki, ov, n1, n2)| {
            let ell = ELLS[e];
            let primes = split_primes(ell);
            let p = primes[pi.index(primes.len().min(200))];
            if ov.contains_key(&p) {
                return None;
            }
            let k = ki.index((p - 1) as usize) as u64;
            Some(LocalPowerCase {
                ell,
                p,
                k,
                overrides: ov.into_iter().collect(),
                n1,
                n2,
            })
        })
}

/// Builds a map that is `x ↦ x^k` at `p` by construction, confirms the
/// exact decider agrees, then checks that the Frobenius of
/// `(n1, n2, f(n1), f(n2))` lies in `C_4` unless `p` divides `b_{f,n}`.
/// Returns whether the implication was exercised.
pub fn check_local_power(c: &LocalPowerCase) -> Result<bool, String> {
    let err = |e: &dyn std::fmt::Display| format!("{c:?}: {e}");
    let mut overrides = BTreeMap::new();
    for &(q, s) in &c.overrides {
        let v = pow_mod(q, c.k, c.p) + s * c.p;
        overrides.insert(q, FactoredRational::factor(v as i64, 1).map_err(|e| err(&e))?);
    }
    let f = MultiplicativeMap::table_with_default_sign(c.k as i64, overrides).map_err(|e| err(&e))?;
    let verdict = local_exponent(&f, c.p, DecisionMode::Exact).map_err(|e| err(&e))?;
    if verdict.member != Membership::Yes || verdict.k_p != Some(c.k % (c.p - 1)) {
        return Err(format!("{c:?}: decider says {verdict:?}"));
    }
    let inv = f_invariants(&f, c.n1, c.n2).map_err(|e| err(&e))?;
    if (&inv.b % c.p).to_string() == "0" {
        return Ok(false);
    }
    let eval = |n: u64| f.evaluate(&FactoredRational::from_integer(n as i64).unwrap());
    let tuple = [
        FactoredRational::from_integer(c.n1 as i64).unwrap(),
        FactoredRational::from_integer(c.n2 as i64).unwrap(),
        eval(c.n1),
        eval(c.n2),
    ];
    let sample = chebotarev::frobenius_vector(c.p, c.ell, &tuple).map_err(|e| err(&e))?;
    if !in_c4(&sample.b_vector, c.ell).map_err(|e| err(&e))? {
        return Err(format!("{c:?}: Frobenius vector {:?} outside C_4", sample.b_vector));
    }
    Ok(true)
}
