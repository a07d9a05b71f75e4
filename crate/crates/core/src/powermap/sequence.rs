//! Functions on the positive integers: shift and quasi-multiplicativity
//! checks, the empirical local exponent for raw sequences, and the CRT
//! construction with prescribed local exponents.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::local::{DecisionMode, LocalVerdict, Membership};
use super::{MultiplicativeMap, PowerMapError};
use crate::modular::{self, DiscreteLog, ModularError, PrimeCache};
use crate::ratfact::FactoredRational;

/// A function `n ↦ f(n)` on `n ≥ 1` with nonzero rational values.
pub trait ArithmeticFunction: Sync {
    fn eval(&self, n: u64) -> Result<FactoredRational, PowerMapError>;
}

impl ArithmeticFunction for MultiplicativeMap {
    fn eval(&self, n: u64) -> Result<FactoredRational, PowerMapError> {
        self.evaluate_integer(n as i64)
    }
}

/// Wraps a closure; `None` stands for the value 0.
pub struct FnSequence<F>(pub F);

impl<F> ArithmeticFunction for FnSequence<F>
where
    F: Fn(u64) -> Option<FactoredRational> + Sync,
{
    fn eval(&self, n: u64) -> Result<FactoredRational, PowerMapError> {
        (self.0)(n).ok_or(PowerMapError::ZeroValue { n })
    }
}

/// `f(1), …, f(n_max)`, each checked integral.
fn integer_values(f: &dyn ArithmeticFunction, n_max: u64) -> Result<Vec<FactoredRational>, PowerMapError> {
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let v = f.eval(n)?;
            if v.is_integer() {
                Ok(v)
            } else {
                Err(PowerMapError::NonIntegral { n })
            }
        })
        .collect()
}

/// Residue of an integer value mod `p`, allowing 0.
fn residue(v: &FactoredRational, p: u64) -> u64 {
    v.reduce_mod_p(p).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftQuasi {
    pub shift_ok: bool,
    pub quasi_ok: bool,
}

fn shift_holds(values: &[FactoredRational], p: u64, bound: u64) -> bool {
    (1..=bound).all(|n| {
        let (a, b) = (&values[(n - 1) as usize], &values[(n + p - 1) as usize]);
        residue(a, p) == residue(b, p)
    })
}

/// `shift_ok`: `f(n+p) ≡ f(n) (mod p)` for `n ≤ bound`.
/// `quasi_ok`: `f(qn) = f(q) f(n)` for primes `q ≤ bound`, `n ≤ bound/q`, `q ∤ n`.
pub fn shift_and_quasi_check(f: &dyn ArithmeticFunction, p: u64, bound: u64) -> Result<ShiftQuasi, PowerMapError> {
    if !modular::is_prime(p) {
        return Err(ModularError::NotPrime(p).into());
    }
    let values = integer_values(f, bound + p)?;
    let at = |n: u64| &values[(n - 1) as usize];
    let quasi_ok = PrimeCache::new(bound).primes().iter().all(|&q| {
        (1..=bound / q)
            .filter(|n| n % q != 0)
            .all(|n| *at(q * n) == at(q).mul(at(n)))
    });
    Ok(ShiftQuasi {
        shift_ok: shift_holds(&values, p, bound),
        quasi_ok,
    })
}

/// Primes `p ≤ x` passing the shift test up to `bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TfScan {
    pub x: u64,
    pub bound: u64,
    pub pi_x: u64,
    pub members: Vec<u64>,
}

pub fn tf_scan(f: &dyn ArithmeticFunction, cache: &PrimeCache, x: u64, bound: u64) -> Result<TfScan, PowerMapError> {
    cache.ensure(x)?;
    let primes = cache.primes_up_to(x);
    let values = integer_values(f, bound + x)?;
    let members = primes
        .par_iter()
        .filter(|&&p| shift_holds(&values, p, bound))
        .copied()
        .collect();
    Ok(TfScan {
        x,
        bound,
        pi_x: primes.len() as u64,
        members,
    })
}

/// Empirical local exponent of a raw sequence: a candidate from the
/// discrete log of `f(g)` at the smallest primitive root `g`, verified on all
/// `n ≤ bound` prime to `p`. Unknown when `g > bound`.
pub fn empirical_sequence_exponent(
    f: &dyn ArithmeticFunction,
    p: u64,
    bound: u64,
) -> Result<LocalVerdict, PowerMapError> {
    if !modular::is_prime(p) {
        return Err(ModularError::NotPrime(p).into());
    }
    let mode = DecisionMode::Empirical { bound };
    let verdict = |member, k_p| LocalVerdict { p, member, k_p, mode };
    let unit_residue = |n: u64| f.eval(n).map(|v| v.reduce_mod_p(p).ok());
    if p == 2 {
        for n in (1..=bound).step_by(2) {
            if unit_residue(n)?.is_none() {
                return Ok(verdict(Membership::No, None));
            }
        }
        return Ok(verdict(Membership::Yes, Some(0)));
    }
    let dl = DiscreteLog::new(p)?;
    let g = dl.generator();
    if g > bound {
        return Ok(verdict(Membership::Unknown, None));
    }
    let Some(fg) = unit_residue(g)? else {
        return Ok(verdict(Membership::No, None));
    };
    let k = dl.log(fg)?;
    for n in (1..=bound).filter(|n| n % p != 0) {
        if unit_residue(n)? != Some(modular::pow_mod(n % p, k, p)) {
            return Ok(verdict(Membership::No, None));
        }
    }
    Ok(verdict(Membership::Yes, Some(k)))
}

/// `n ↦` the CRT lift in `[1, ∏ p]` of `n^{k_p} mod p` over the prescribed
/// primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrescribedFunction {
    exponents: BTreeMap<u64, u64>,
    modulus: u64,
}

pub fn construct_prescribed(exponents: &BTreeMap<u64, u64>) -> Result<PrescribedFunction, PowerMapError> {
    if exponents.is_empty() {
        return Err(PowerMapError::EmptyPrimeSet);
    }
    let mut modulus = 1u64;
    for (&p, &k) in exponents {
        if p == 2 || !modular::is_prime(p) {
            return Err(PowerMapError::NotOddPrime(p));
        }
        if k > p - 2 {
            return Err(PowerMapError::ExponentOutOfRange { p, k });
        }
        modulus = modulus.checked_mul(p).ok_or(PowerMapError::ModulusOverflow)?;
    }
    Ok(PrescribedFunction {
        exponents: exponents.clone(),
        modulus,
    })
}

impl PrescribedFunction {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponents(&self) -> &BTreeMap<u64, u64> {
        &self.exponents
    }

    pub fn value(&self, n: u64) -> u64 {
        let mut x = 0u64;
        let mut m = 1u64;
        for (&p, &k) in &self.exponents {
            let r = modular::pow_mod(n % p, k, p);
            // x + m t ≡ r (mod p)
            let inv = modular::inv_mod(m % p, p).expect("distinct primes");
            let t = modular::mul_mod((r + p - x % p) % p, inv, p);
            x += m * t;
            m *= p;
        }
        if x == 0 {
            self.modulus
        } else {
            x
        }
    }
}

impl ArithmeticFunction for PrescribedFunction {
    fn eval(&self, n: u64) -> Result<FactoredRational, PowerMapError> {
        Ok(FactoredRational::from_integer(self.value(n) as i64)?)
    }
}
