//! Discrete logarithms in `(Z/pZ)^×` by Pohlig–Hellman reduction to
//! prime-order subgroups, each solved with baby-step/giant-step.

use std::collections::HashMap;

use super::{factor_u64, inv_mod, mul_mod, pow_mod, primitive_root_with, ModularError, DEFAULT_TRIAL_BOUND};

/// Below this subgroup order a linear scan beats building a table.
const LINEAR_SCAN_ORDER: u64 = 64;

/// A prime modulus together with a generator and the factorization of the
/// group order, so repeated logarithms don't refactor `p - 1`.
#[derive(Debug, Clone)]
pub struct DiscreteLog {
    p: u64,
    g: u64,
    factors: Vec<(u64, u32)>,
}

impl DiscreteLog {
    /// Uses the smallest primitive root of `p`.
    pub fn new(p: u64) -> Result<Self, ModularError> {
        if !super::is_prime(p) {
            return Err(ModularError::NotPrime(p));
        }
        let factors = factor_u64(p - 1, DEFAULT_TRIAL_BOUND)?;
        let g = primitive_root_with(p, &factors);
        Ok(Self { p, g, factors })
    }

    pub fn with_generator(g: u64, p: u64) -> Result<Self, ModularError> {
        if !super::is_prime(p) {
            return Err(ModularError::NotPrime(p));
        }
        let factors = factor_u64(p - 1, DEFAULT_TRIAL_BOUND)?;
        let g = g % p;
        let generates = g != 0 && (p == 2 || factors.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1));
        if !generates {
            return Err(ModularError::NotAGenerator { g, p });
        }
        Ok(Self { p, g, factors })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    pub fn order_factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Exponent `x` in `[0, p-2]` with `g^x ≡ h (mod p)`.
    pub fn log(&self, h: u64) -> Result<u64, ModularError> {
        let p = self.p;
        let h = h % p;
        if h == 0 {
            return Err(ModularError::NotAUnit { h, p });
        }
        if p == 2 {
            return Ok(0);
        }
        let order = p - 1;
        let mut residue = 0u64;
        let mut modulus = 1u64;
        for &(q, e) in &self.factors {
            let qe = q.pow(e);
            let cofactor = order / qe;
            let gq = pow_mod(self.g, cofactor, p);
            let hq = pow_mod(h, cofactor, p);
            let x = self.log_prime_power(gq, hq, q, e)?;
            // CRT: combine x mod q^e with the running residue
            let inv = inv_mod(modulus % qe, qe).expect("distinct prime powers are coprime");
            let t = mul_mod((x + qe - residue % qe) % qe, inv, qe);
            residue += modulus * t;
            modulus *= qe;
        }
        debug_assert_eq!(pow_mod(self.g, residue, p), h);
        Ok(residue)
    }

    // log of h to base g where g has order q^e.
    fn log_prime_power(&self, g: u64, h: u64, q: u64, e: u32) -> Result<u64, ModularError> {
        let p = self.p;
        let gamma = pow_mod(g, q.pow(e - 1), p);
        let g_inv = inv_mod(g, p).expect("generator is a unit");
        let mut x = 0u64;
        let mut q_pow = 1u64;
        for k in 0..e {
            // strip the digits found so far, then project to the order-q subgroup
            let stripped = mul_mod(h, pow_mod(g_inv, x, p), p);
            let hk = pow_mod(stripped, q.pow(e - 1 - k), p);
            let digit = baby_step_giant_step(gamma, hk, q, p).ok_or(ModularError::NoLogarithm { g: self.g, h, p })?;
            x += digit * q_pow;
            q_pow *= q;
        }
        Ok(x)
    }
}

/// Solves `base^x = target` in a subgroup of prime order `order`.
fn baby_step_giant_step(base: u64, target: u64, order: u64, p: u64) -> Option<u64> {
    if order <= LINEAR_SCAN_ORDER {
        let mut acc = 1u64;
        for x in 0..order {
            if acc == target {
                return Some(x);
            }
            acc = mul_mod(acc, base, p);
        }
        return None;
    }
    let m = (order as f64).sqrt().ceil() as u64;
    let mut table = HashMap::with_capacity(m as usize);
    let mut acc = 1u64;
    for j in 0..m {
        table.entry(acc).or_insert(j);
        acc = mul_mod(acc, base, p);
    }
    // base^{-m}
    let giant = inv_mod(pow_mod(base, m, p), p)?;
    let mut gamma = target;
    for i in 0..m {
        if let Some(&j) = table.get(&gamma) {
            return Some((i * m + j) % order);
        }
        gamma = mul_mod(gamma, giant, p);
    }
    None
}

/// `x` in `[0, p-2]` with `g^x ≡ h (mod p)`; `g` must generate `(Z/pZ)^×`.
pub fn discrete_log(g: u64, h: u64, p: u64) -> Result<u64, ModularError> {
    DiscreteLog::with_generator(g, p)?.log(h)
}
