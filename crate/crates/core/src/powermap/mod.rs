//! Completely multiplicative maps on `Q^×` and their local power behaviour.
//!
//! A [`MultiplicativeMap`] is fixed by `f(-1)`, finitely many prime
//! overrides, and a default rule `q ↦ q^k` for every other prime. Because the
//! default rule pins the local exponent at every prime, membership in `S_f`
//! is decidable exactly for this family (see [`local`]).

mod local;
mod sequence;
mod witness;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modular::{self, ModularError};
use crate::ratfact::{FactoredRational, RatError, Sign};

pub use local::{local_exponent, scan_sf, vote_nu_f, DecisionMode, LocalDecider, LocalVerdict, Membership, SfScan};
pub use sequence::{
    construct_prescribed, empirical_sequence_exponent, shift_and_quasi_check, tf_scan, ArithmeticFunction, FnSequence,
    PrescribedFunction, ShiftQuasi, TfScan,
};
pub use witness::{find_witness, in_signed_power_orbit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PowerMapError {
    #[error(transparent)]
    Rational(#[from] RatError),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error("override key {0} is not prime")]
    OverrideNotPrime(u64),
    #[error("malformed function spec: {0}")]
    Spec(String),
    #[error("f({n}) is not an integer")]
    NonIntegral { n: u64 },
    #[error("f({n}) = 0")]
    ZeroValue { n: u64 },
    #[error("found only {found} of {needed} witnesses below {limit}")]
    Exhausted { found: usize, needed: usize, limit: u64 },
    #[error("the prescribed prime set is empty")]
    EmptyPrimeSet,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("exponent {k} for p = {p} is outside [0, p-2]")]
    ExponentOutOfRange { p: u64, k: u64 },
    #[error("product of the prescribed primes overflows 64 bits")]
    ModulusOverflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    GlobalPower,
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicativeMap {
    sign_value: Sign,
    overrides: BTreeMap<u64, FactoredRational>,
    default_exponent: i64,
}

impl MultiplicativeMap {
    /// The global power map `α ↦ α^k`.
    pub fn power(k: i64) -> Self {
        Self {
            sign_value: if k % 2 == 0 { Sign::Positive } else { Sign::Negative },
            overrides: BTreeMap::new(),
            default_exponent: k,
        }
    }

    pub fn table(
        sign_value: Sign,
        default_exponent: i64,
        overrides: BTreeMap<u64, FactoredRational>,
    ) -> Result<Self, PowerMapError> {
        if let Some(&q) = overrides.keys().find(|&&q| !modular::is_prime(q)) {
            return Err(PowerMapError::OverrideNotPrime(q));
        }
        Ok(Self {
            sign_value,
            overrides,
            default_exponent,
        })
    }

    /// A table whose `f(-1)` follows the default rule, `(-1)^k`.
    pub fn table_with_default_sign(
        default_exponent: i64,
        overrides: BTreeMap<u64, FactoredRational>,
    ) -> Result<Self, PowerMapError> {
        let sign = if default_exponent % 2 == 0 {
            Sign::Positive
        } else {
            Sign::Negative
        };
        Self::table(sign, default_exponent, overrides)
    }

    pub fn kind(&self) -> MapKind {
        if self.overrides.is_empty() && self.sign_value == Self::power(self.default_exponent).sign_value {
            MapKind::GlobalPower
        } else {
            MapKind::Table
        }
    }

    pub fn sign_value(&self) -> Sign {
        self.sign_value
    }

    pub fn overrides(&self) -> &BTreeMap<u64, FactoredRational> {
        &self.overrides
    }

    pub fn default_exponent(&self) -> i64 {
        self.default_exponent
    }

    /// `f(q)` for a prime `q`.
    pub fn at_prime(&self, q: u64) -> FactoredRational {
        match self.overrides.get(&q) {
            Some(v) => v.clone(),
            None => {
                FactoredRational::from_parts_unchecked(Sign::Positive, BTreeMap::from([(q, self.default_exponent)]))
            }
        }
    }

    pub fn evaluate(&self, x: &FactoredRational) -> FactoredRational {
        let sign = if x.is_negative() {
            self.sign_value
        } else {
            Sign::Positive
        };
        let mut exponents = BTreeMap::new();
        let mut acc = FactoredRational::from_parts_unchecked(sign, BTreeMap::new());
        for (&q, &e) in x.exponents() {
            match self.overrides.get(&q) {
                Some(v) => acc = acc.mul(&v.pow(e)),
                None => {
                    exponents.insert(q, self.default_exponent * e);
                }
            }
        }
        acc.mul(&FactoredRational::from_parts_unchecked(Sign::Positive, exponents))
    }

    pub fn evaluate_integer(&self, n: i64) -> Result<FactoredRational, PowerMapError> {
        Ok(self.evaluate(&FactoredRational::from_integer(n)?))
    }

    /// Same values on the positive integers, with `f(-1) = (-1)^{ν_f}`.
    pub fn extend_to_q(&self, nu_f: u8) -> Self {
        Self {
            sign_value: if nu_f % 2 == 0 { Sign::Positive } else { Sign::Negative },
            ..self.clone()
        }
    }

    pub fn to_spec(&self) -> FunctionSpec {
        match self.kind() {
            MapKind::GlobalPower => FunctionSpec::Power {
                exponent: self.default_exponent,
            },
            MapKind::Table => FunctionSpec::Table {
                sign_value: Some(self.sign_value.as_i64()),
                default_exponent: self.default_exponent,
                overrides: self
                    .overrides
                    .iter()
                    .map(|(q, v)| (q.to_string(), RationalText::Text(crate::ratfact::format_fraction(v))))
                    .collect(),
            },
        }
    }
}

/// Builds the extension to `Q^×` of a function given on primes of `N`.
///
/// `values` overrides the default rule `q ↦ q^k` at finitely many primes.
pub fn extend_to_q(
    values: &BTreeMap<u64, i64>,
    default_exponent: i64,
    nu_f: u8,
) -> Result<MultiplicativeMap, PowerMapError> {
    let mut overrides = BTreeMap::new();
    for (&q, &v) in values {
        if v == 0 {
            return Err(PowerMapError::ZeroValue { n: q });
        }
        overrides.insert(q, FactoredRational::from_integer(v)?);
    }
    Ok(MultiplicativeMap::table(Sign::Positive, default_exponent, overrides)?.extend_to_q(nu_f))
}

/// An override value: `"7/4"` or a bare integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Integer(i64),
    Text(String),
}

impl RationalText {
    fn parse(&self) -> Result<FactoredRational, PowerMapError> {
        match self {
            RationalText::Integer(n) => Ok(FactoredRational::from_integer(*n)?),
            RationalText::Text(s) => Ok(s.parse()?),
        }
    }
}

/// The JSON form of a function, e.g. `{"kind":"power","exponent":2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Power {
        exponent: i64,
    },
    Table {
        /// Defaults to `(-1)^default_exponent` when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sign_value: Option<i64>,
        default_exponent: i64,
        #[serde(default)]
        overrides: BTreeMap<String, RationalText>,
    },
}

impl FunctionSpec {
    pub fn from_json(text: &str) -> Result<Self, PowerMapError> {
        serde_json::from_str(text).map_err(|e| PowerMapError::Spec(e.to_string()))
    }

    pub fn build(&self) -> Result<MultiplicativeMap, PowerMapError> {
        match self {
            FunctionSpec::Power { exponent } => Ok(MultiplicativeMap::power(*exponent)),
            FunctionSpec::Table {
                sign_value,
                default_exponent,
                overrides,
            } => {
                let mut parsed = BTreeMap::new();
                for (key, value) in overrides {
                    let q: u64 = key
                        .trim()
                        .parse()
                        .map_err(|_| PowerMapError::Spec(format!("override key {key:?} is not an integer")))?;
                    let v = value
                        .parse()
                        .map_err(|e| PowerMapError::Spec(format!("override {key}: {e}")))?;
                    parsed.insert(q, v);
                }
                match sign_value {
                    Some(s) => {
                        let sign = Sign::from_i64(*s).map_err(|e| PowerMapError::Spec(e.to_string()))?;
                        MultiplicativeMap::table(sign, *default_exponent, parsed)
                    }
                    None => MultiplicativeMap::table_with_default_sign(*default_exponent, parsed),
                }
            }
        }
    }
}
