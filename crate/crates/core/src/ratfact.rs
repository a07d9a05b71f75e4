//! Nonzero rationals in fully factored form.
//!
//! A [`FactoredRational`] is a sign together with a finite map from primes to
//! nonzero exponents. Multiplication, inversion and powers are exponent
//! arithmetic, so they never overflow in practice; recomposing numerator and
//! denominator goes through big integers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modular::{self, pow_mod, ModularError, DEFAULT_TRIAL_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatError {
    #[error("0 has no factored form")]
    Zero,
    #[error("{value} is not a {p}-adic unit")]
    NotPAdicUnit { value: String, p: u64 },
    #[error("cannot factor {n}: composite cofactor {cofactor} has no factor below {bound}")]
    Unfactorable { n: u64, cofactor: u64, bound: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent of {0} is zero")]
    ZeroExponent(u64),
    #[error("malformed rational {0:?}")]
    Parse(String),
    #[error("sign must be +1 or -1, got {0}")]
    BadSign(i64),
}

/// Sign of a nonzero rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_i64(s: i64) -> Result<Self, RatError> {
        match s {
            1 => Ok(Sign::Positive),
            -1 => Ok(Sign::Negative),
            other => Err(RatError::BadSign(other)),
        }
    }

    fn flip_if(self, odd: bool) -> Self {
        match (self, odd) {
            (s, false) => s,
            (Sign::Positive, true) => Sign::Negative,
            (Sign::Negative, true) => Sign::Positive,
        }
    }

    fn times(self, other: Sign) -> Sign {
        self.flip_if(other == Sign::Negative)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredRational {
    sign: Sign,
    exponents: BTreeMap<u64, i64>,
}

impl FactoredRational {
    pub fn one() -> Self {
        Self {
            sign: Sign::Positive,
            exponents: BTreeMap::new(),
        }
    }

    pub fn minus_one() -> Self {
        Self {
            sign: Sign::Negative,
            exponents: BTreeMap::new(),
        }
    }

    /// A prime power `p^e`.
    pub fn prime_power(p: u64, e: i64) -> Result<Self, RatError> {
        if !modular::is_prime(p) {
            return Err(RatError::NotPrime(p));
        }
        let mut exponents = BTreeMap::new();
        if e != 0 {
            exponents.insert(p, e);
        }
        Ok(Self {
            sign: Sign::Positive,
            exponents,
        })
    }

    /// Builds a value from its parts, validating every key as prime and every
    /// exponent as nonzero.
    pub fn from_parts(sign: Sign, exponents: BTreeMap<u64, i64>) -> Result<Self, RatError> {
        for (&p, &e) in &exponents {
            if !modular::is_prime(p) {
                return Err(RatError::NotPrime(p));
            }
            if e == 0 {
                return Err(RatError::ZeroExponent(p));
            }
        }
        Ok(Self { sign, exponents })
    }

    /// Caller guarantees prime keys; zero exponents are dropped.
    pub(crate) fn from_parts_unchecked(sign: Sign, mut exponents: BTreeMap<u64, i64>) -> Self {
        exponents.retain(|_, e| *e != 0);
        Self { sign, exponents }
    }

    pub fn from_integer(n: i64) -> Result<Self, RatError> {
        Self::factor(n, 1)
    }

    /// Factors `numerator / denominator` with the default trial-division bound.
    pub fn factor(numerator: i64, denominator: i64) -> Result<Self, RatError> {
        Self::factor_with_bound(numerator, denominator, DEFAULT_TRIAL_BOUND)
    }

    pub fn factor_with_bound(numerator: i64, denominator: i64, bound: u64) -> Result<Self, RatError> {
        if numerator == 0 || denominator == 0 {
            return Err(RatError::Zero);
        }
        let sign = if (numerator < 0) != (denominator < 0) {
            Sign::Negative
        } else {
            Sign::Positive
        };
        let mut exponents = BTreeMap::new();
        for (magnitude, direction) in [(numerator.unsigned_abs(), 1i64), (denominator.unsigned_abs(), -1)] {
            for (p, e) in factor_checked(magnitude, bound)? {
                *exponents.entry(p).or_insert(0) += direction * e as i64;
            }
        }
        exponents.retain(|_, e| *e != 0);
        Ok(Self { sign, exponents })
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_negative(&self) -> bool {
        self.sign == Sign::Negative
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    /// Primes with nonzero exponent, ascending.
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.exponents.keys().copied()
    }

    pub fn ord_p(&self, p: u64) -> i64 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    /// True for `±1`.
    pub fn is_unit(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.is_unit() && self.sign == Sign::Positive
    }

    pub fn is_integer(&self) -> bool {
        self.exponents.values().all(|&e| e > 0)
    }

    /// Number of distinct prime divisors.
    pub fn nu(&self) -> usize {
        self.exponents.len()
    }

    pub fn abs(&self) -> Self {
        Self {
            sign: Sign::Positive,
            exponents: self.exponents.clone(),
        }
    }

    pub fn numerator(&self) -> BigUint {
        self.exponents
            .iter()
            .filter(|(_, &e)| e > 0)
            .map(|(&p, &e)| BigUint::from(p).pow(e as u32))
            .product()
    }

    pub fn denominator(&self) -> BigUint {
        self.exponents
            .iter()
            .filter(|(_, &e)| e < 0)
            .map(|(&p, &e)| BigUint::from(p).pow(e.unsigned_abs() as u32))
            .product()
    }

    /// `log(num · den)`, summed from the factorization.
    pub fn log_num_den(&self) -> f64 {
        self.exponents
            .iter()
            .map(|(&p, &e)| e.unsigned_abs() as f64 * (p as f64).ln())
            .sum()
    }

    pub fn to_big_rational(&self) -> BigRational {
        let sign = match self.sign {
            Sign::Positive => BigSign::Plus,
            Sign::Negative => BigSign::Minus,
        };
        BigRational::new(
            BigInt::from_biguint(sign, self.numerator()),
            BigInt::from(self.denominator()),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exponents = self.exponents.clone();
        for (&p, &e) in &other.exponents {
            *exponents.entry(p).or_insert(0) += e;
        }
        exponents.retain(|_, e| *e != 0);
        Self {
            sign: self.sign.times(other.sign),
            exponents,
        }
    }

    pub fn inv(&self) -> Self {
        Self {
            sign: self.sign,
            exponents: self.exponents.iter().map(|(&p, &e)| (p, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        let sign = if self.sign == Sign::Negative && k % 2 != 0 {
            Sign::Negative
        } else {
            Sign::Positive
        };
        Self {
            sign,
            exponents: self.exponents.iter().map(|(&p, &e)| (p, e * k)).collect(),
        }
    }

    /// Unit residue of `self` modulo `p`, in `1..p`.
    pub fn reduce_mod_p(&self, p: u64) -> Result<u64, RatError> {
        if self.ord_p(p) != 0 {
            return Err(RatError::NotPAdicUnit {
                value: self.to_string(),
                p,
            });
        }
        if p == 2 {
            return Ok(1);
        }
        let mut acc = match self.sign {
            Sign::Positive => 1,
            Sign::Negative => p - 1,
        };
        for (&q, &e) in &self.exponents {
            let base = q % p;
            let power = pow_mod(base, e.unsigned_abs() % (p - 1), p);
            let factor = if e < 0 {
                modular::inv_mod(power, p).expect("unit residue is invertible")
            } else {
                power
            };
            acc = modular::mul_mod(acc, factor, p);
        }
        Ok(acc)
    }

    /// Value as `i128` when it is an integer that fits.
    pub fn to_i128(&self) -> Option<i128> {
        if !self.is_integer() {
            return None;
        }
        let mut acc: i128 = 1;
        for (&p, &e) in &self.exponents {
            acc = acc.checked_mul((p as i128).checked_pow(e as u32)?)?;
        }
        Some(acc * self.sign.as_i64() as i128)
    }
}

fn factor_checked(n: u64, bound: u64) -> Result<Vec<(u64, u32)>, RatError> {
    modular::factor_u64(n, bound).map_err(|e| match e {
        ModularError::Unfactorable { n, cofactor, bound } => RatError::Unfactorable { n, cofactor, bound },
        other => unreachable!("factoring only fails on composite cofactors: {other}"),
    })
}

impl fmt::Display for FactoredRational {
    /// `+2^1 * 3^-1`; units print as `+1` / `-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign == Sign::Negative { '-' } else { '+' };
        if self.exponents.is_empty() {
            return write!(f, "{sign}1");
        }
        write!(f, "{sign}")?;
        for (i, (p, e)) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{p}^{e}")?;
        }
        Ok(())
    }
}

impl FromStr for FactoredRational {
    type Err = RatError;

    /// Parses `"-7/4"`, `"12"`, `"+3"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RatError::Parse(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: i64 = num.parse().map_err(|_| bad())?;
        let den: i64 = den.parse().map_err(|_| bad())?;
        Self::factor(num, den)
    }
}

/// Renders as `num/den` (or just `num` for integers).
pub fn format_fraction(x: &FactoredRational) -> String {
    let sign = if x.is_negative() { "-" } else { "" };
    let den = x.denominator();
    if den == BigUint::from(1u8) {
        format!("{sign}{}", x.numerator())
    } else {
        format!("{sign}{}/{den}", x.numerator())
    }
}

#[derive(Serialize, Deserialize)]
struct FactoredJson {
    sign: i64,
    exponents: BTreeMap<String, i64>,
}

impl Serialize for FactoredRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FactoredJson {
            sign: self.sign.as_i64(),
            exponents: self.exponents.iter().map(|(p, e)| (p.to_string(), *e)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FactoredRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = FactoredJson::deserialize(deserializer)?;
        let sign = Sign::from_i64(raw.sign).map_err(D::Error::custom)?;
        let mut exponents = BTreeMap::new();
        for (k, e) in raw.exponents {
            let p: u64 = k
                .parse()
                .map_err(|_| D::Error::custom(format!("bad prime key {k:?}")))?;
            exponents.insert(p, e);
        }
        FactoredRational::from_parts(sign, exponents).map_err(D::Error::custom)
    }
}
