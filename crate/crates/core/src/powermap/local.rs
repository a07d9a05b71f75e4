//! Deciding whether `f` is a local power map at a prime `p`.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{MultiplicativeMap, PowerMapError};
use crate::modular::{self, DiscreteLog, ModularError, PrimeCache};
use crate::ratfact::{FactoredRational, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionMode {
    Exact,
    /// Verify a candidate exponent on `-1` and on every prime `q ≤ bound`.
    Empirical {
        bound: u64,
    },
}

impl fmt::Display for DecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionMode::Exact => write!(f, "exact"),
            DecisionMode::Empirical { bound } => write!(f, "empirical({bound})"),
        }
    }
}

impl Serialize for DecisionMode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalVerdict {
    pub p: u64,
    pub member: Membership,
    /// Present exactly when `member` is `Yes`; reduced into `[0, p-2]`.
    pub k_p: Option<u64>,
    pub mode: DecisionMode,
}

impl LocalVerdict {
    fn no(p: u64, mode: DecisionMode) -> Self {
        Self {
            p,
            member: Membership::No,
            k_p: None,
            mode,
        }
    }

    fn yes(p: u64, k: u64, mode: DecisionMode) -> Self {
        Self {
            p,
            member: Membership::Yes,
            k_p: Some(k),
            mode,
        }
    }
}

fn sign_residue(sign: Sign, p: u64) -> u64 {
    match sign {
        Sign::Positive => 1 % p,
        Sign::Negative => p - 1,
    }
}

/// Reusable decision state for one map and mode; empirical mode caches
/// `f(q)` for the primes `q ≤ B`.
#[derive(Debug, Clone)]
pub struct LocalDecider<'a> {
    f: &'a MultiplicativeMap,
    mode: DecisionMode,
    sample: Vec<(u64, FactoredRational)>,
}

impl<'a> LocalDecider<'a> {
    pub fn new(f: &'a MultiplicativeMap, mode: DecisionMode) -> Self {
        let sample = match mode {
            DecisionMode::Exact => Vec::new(),
            DecisionMode::Empirical { bound } => PrimeCache::new(bound)
                .primes()
                .iter()
                .map(|&q| (q, f.at_prime(q)))
                .collect(),
        };
        Self { f, mode, sample }
    }

    pub fn decide(&self, p: u64) -> Result<LocalVerdict, PowerMapError> {
        if !modular::is_prime(p) {
            return Err(ModularError::NotPrime(p).into());
        }
        match self.mode {
            DecisionMode::Exact => Ok(self.exact(p)),
            DecisionMode::Empirical { .. } => self.empirical(p),
        }
    }

    fn exact(&self, p: u64) -> LocalVerdict {
        let mode = self.mode;
        let f = self.f;
        if p == 2 {
            // k_2 lives in Z/1Z: only unit-preservation matters
            let ok = f.overrides().iter().all(|(&q, v)| q == 2 || v.ord_p(2) == 0);
            return if ok {
                LocalVerdict::yes(2, 0, mode)
            } else {
                LocalVerdict::no(2, mode)
            };
        }
        let k = f.default_exponent().rem_euclid(p as i64 - 1) as u64;
        let parity_sign = if k % 2 == 0 { Sign::Positive } else { Sign::Negative };
        if f.sign_value() != parity_sign {
            return LocalVerdict::no(p, mode);
        }
        for (&q, v) in f.overrides() {
            if q == p {
                continue;
            }
            match v.reduce_mod_p(p) {
                Ok(r) if r == modular::pow_mod(q % p, k, p) => {}
                _ => return LocalVerdict::no(p, mode),
            }
        }
        LocalVerdict::yes(p, k, mode)
    }

    fn empirical(&self, p: u64) -> Result<LocalVerdict, PowerMapError> {
        let mode = self.mode;
        if p == 2 {
            let ok = self.sample.iter().all(|(q, v)| *q == 2 || v.ord_p(2) == 0);
            return Ok(if ok {
                LocalVerdict::yes(2, 0, mode)
            } else {
                LocalVerdict::no(2, mode)
            });
        }
        let dl = DiscreteLog::new(p)?;
        let g = dl.generator();
        let fg = self.f.evaluate(&FactoredRational::from_integer(g as i64)?);
        let Ok(fg) = fg.reduce_mod_p(p) else {
            return Ok(LocalVerdict::no(p, mode));
        };
        let k = dl.log(fg)?;
        if sign_residue(self.f.sign_value(), p) != modular::pow_mod(p - 1, k, p) {
            return Ok(LocalVerdict::no(p, mode));
        }
        for (q, v) in &self.sample {
            if *q == p {
                continue;
            }
            match v.reduce_mod_p(p) {
                Ok(r) if r == modular::pow_mod(q % p, k, p) => {}
                _ => return Ok(LocalVerdict::no(p, mode)),
            }
        }
        Ok(LocalVerdict::yes(p, k, mode))
    }
}

pub fn local_exponent(f: &MultiplicativeMap, p: u64, mode: DecisionMode) -> Result<LocalVerdict, PowerMapError> {
    LocalDecider::new(f, mode).decide(p)
}

/// Verdicts for every prime `p ≤ x`, in increasing order of `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SfScan {
    pub x: u64,
    pub pi_x: u64,
    pub verdicts: Vec<LocalVerdict>,
}

impl SfScan {
    pub fn members(&self) -> impl Iterator<Item = &LocalVerdict> {
        self.verdicts.iter().filter(|v| v.member == Membership::Yes)
    }

    pub fn count(&self) -> u64 {
        self.members().count() as u64
    }

    pub fn density(&self) -> f64 {
        if self.pi_x == 0 {
            0.0
        } else {
            self.count() as f64 / self.pi_x as f64
        }
    }
}

/// Decides membership at every prime up to `x`. Work is spread over the
/// current rayon pool; the result does not depend on the pool size.
pub fn scan_sf(f: &MultiplicativeMap, cache: &PrimeCache, x: u64, mode: DecisionMode) -> Result<SfScan, PowerMapError> {
    cache.ensure(x)?;
    let primes = cache.primes_up_to(x);
    let decider = LocalDecider::new(f, mode);
    let verdicts = primes
        .par_iter()
        .map(|&p| decider.decide(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SfScan {
        x,
        pi_x: primes.len() as u64,
        verdicts,
    })
}

/// Parity vote for ν_f: 0 when even local exponents are at least as common
/// as odd ones among odd members, 1 otherwise.
pub fn vote_nu_f(verdicts: &[LocalVerdict]) -> u8 {
    let (mut even, mut odd) = (0usize, 0usize);
    for v in verdicts.iter().filter(|v| v.p > 2) {
        match v.k_p {
            Some(k) if k % 2 == 0 => even += 1,
            Some(_) => odd += 1,
            None => {}
        }
    }
    u8::from(odd > even)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powermap::tests::table;
    use proptest::prelude::*;

    fn exact(f: &MultiplicativeMap, p: u64) -> LocalVerdict {
        local_exponent(f, p, DecisionMode::Exact).unwrap()
    }

    #[test]
    fn global_power_map_is_local_everywhere() {
        let f = MultiplicativeMap::power(2);
        assert_eq!(exact(&f, 7), LocalVerdict::yes(7, 2, DecisionMode::Exact));
        let cache = PrimeCache::new(100);
        let scan = scan_sf(&f, &cache, 100, DecisionMode::Exact).unwrap();
        assert_eq!(scan.count(), 25);
        for v in scan.members() {
            assert_eq!(Some(2 % (v.p - 1).max(1)), v.k_p.map(|k| k % (v.p - 1).max(1)));
        }
    }

    #[test]
    fn table_sign_follows_the_default_rule() {
        // With f(-1) = (-1)^1 the only constraints come from the overrides.
        let f = table(-1, 1, &[(2, 5, 1), (3, 7, 1), (5, 11, 1)]);
        assert_eq!(exact(&f, 3), LocalVerdict::yes(3, 1, DecisionMode::Exact));
        assert_eq!(exact(&f, 5).member, Membership::No);
        // f(-1) = +1 with k_3 = 1 is inconsistent: -1 must map to -1 mod 3
        let g = table(1, 1, &[(2, 5, 1), (3, 7, 1), (5, 11, 1)]);
        assert_eq!(exact(&g, 3).member, Membership::No);
    }

    #[test]
    fn exact_scan_of_the_three_override_table() {
        let f = table(-1, 1, &[(2, 5, 1), (3, 7, 1), (5, 11, 1)]);
        let cache = PrimeCache::new(10_000);
        let scan = scan_sf(&f, &cache, 10_000, DecisionMode::Exact).unwrap();
        let members: Vec<u64> = scan.members().map(|v| v.p).collect();
        assert_eq!(members, vec![2, 3]);
    }

    #[test]
    fn swapped_table_has_empty_sf() {
        let f = table(-1, 1, &[(2, 3, 1), (3, 2, 1)]);
        let cache = PrimeCache::new(10);
        assert_eq!(scan_sf(&f, &cache, 10, DecisionMode::Exact).unwrap().count(), 0);
    }

    #[test]
    fn scan_needs_cache_coverage() {
        let cache = PrimeCache::new(10);
        assert!(matches!(
            scan_sf(&MultiplicativeMap::power(1), &cache, 11, DecisionMode::Exact),
            Err(PowerMapError::Modular(ModularError::CacheTooSmall { .. }))
        ));
    }

    #[test]
    fn exact_matches_exhaustive_residue_check() {
        // oracle: test f(a) ≡ a^k for every unit a ≤ 60 (covering all override
        // primes) and f(-1) for the sign
        let maps = [
            table(-1, 1, &[(2, 5, 1), (3, 7, 1), (5, 11, 1)]),
            table(1, 2, &[(2, 9, 1), (7, 2, 1)]),
            table(-1, 3, &[(3, 1, 2)]),
            MultiplicativeMap::power(-1),
        ];
        for f in &maps {
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
                let oracle = (0..(p - 1).max(1)).find(|&k| {
                    (1..=60u64).filter(|a| a % p != 0).all(|a| {
                        match f.evaluate_integer(a as i64).unwrap().reduce_mod_p(p) {
                            Ok(r) => r == modular::pow_mod(a % p, k, p),
                            Err(_) => false,
                        }
                    }) && (p == 2
                        || f.evaluate_integer(-1).unwrap().reduce_mod_p(p).unwrap() == modular::pow_mod(p - 1, k, p))
                });
                let verdict = exact(f, p);
                assert_eq!(verdict.k_p, oracle, "p={p} f={f:?}");
            }
        }
    }

    #[test]
    fn parity_vote() {
        let f = MultiplicativeMap::power(2);
        let cache = PrimeCache::new(200);
        assert_eq!(
            vote_nu_f(&scan_sf(&f, &cache, 200, DecisionMode::Exact).unwrap().verdicts),
            0
        );
        let g = MultiplicativeMap::power(3);
        assert_eq!(
            vote_nu_f(&scan_sf(&g, &cache, 200, DecisionMode::Exact).unwrap().verdicts),
            1
        );
    }

    fn small_map() -> impl Strategy<Value = MultiplicativeMap> {
        (
            prop::bool::ANY,
            -4i64..=4,
            prop::collection::btree_map(
                prop::sample::select(vec![2u64, 3, 5, 7]),
                (prop_oneof![-60i64..=-1, 1i64..=60], 1i64..=20),
                0..3,
            ),
        )
            .prop_map(|(neg, k, raw)| {
                let sign = if neg { Sign::Negative } else { Sign::Positive };
                let overrides = raw
                    .into_iter()
                    .map(|(q, (n, d))| (q, FactoredRational::factor(n, d).unwrap()))
                    .collect();
                MultiplicativeMap::table(sign, k, overrides).unwrap()
            })
    }

    proptest! {
        #[test]
        fn exact_yes_implies_empirical_yes(f in small_map(), bound in prop::sample::select(vec![10u64, 50, 200])) {
            let empirical = LocalDecider::new(&f, DecisionMode::Empirical { bound });
            for p in PrimeCache::new(150).primes() {
                let e = exact(&f, *p);
                if e.member == Membership::Yes {
                    let m = empirical.decide(*p).unwrap();
                    prop_assert_eq!(m.member, Membership::Yes);
                    prop_assert_eq!(m.k_p, e.k_p);
                }
            }
        }

        #[test]
        fn global_power_exponent_is_reduced_default(k in -20i64..=20) {
            let f = MultiplicativeMap::power(k);
            for p in PrimeCache::new(100).primes() {
                let v = exact(&f, *p);
                prop_assert_eq!(v.member, Membership::Yes);
                prop_assert_eq!(v.k_p, Some(k.rem_euclid((*p as i64 - 1).max(1)) as u64));
            }
        }
    }
}
