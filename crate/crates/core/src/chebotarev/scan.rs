//! Prime-range scans: Frobenius class densities, split densities, and the
//! heuristic count of accidental local power behaviour.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{class_ratio, frobenius_vector_with, in_c2k, ChebotarevError, ClassRatio, ClassSpec, RootsOfUnity};
use crate::lattice::{self, KummerDegree};
use crate::modular::{self, check_odd_prime_ell, solve_power_congruences, DiscreteLog, PrimeCache};
use crate::powermap::MultiplicativeMap;
use crate::ratfact::FactoredRational;

fn bad_primes(c: &[FactoredRational]) -> BTreeSet<u64> {
    c.iter().flat_map(|x| x.support()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrobeniusRow {
    pub p: u64,
    pub z: Vec<u64>,
    pub b: Vec<u64>,
    pub in_class: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityScan {
    pub ell: u64,
    pub x: u64,
    /// Primes `p ≡ 1 (mod ℓ)` that entered the statistic.
    pub counted: u64,
    /// Primes `p ≡ 1 (mod ℓ)` dividing some numerator or denominator.
    pub skipped: u64,
    pub in_class: u64,
    pub observed: f64,
    pub expected: f64,
    pub deviation: f64,
    pub kummer: KummerDegree,
    pub class: ClassRatio,
    pub items: Vec<FrobeniusRow>,
}

/// Share of primes `p ≡ 1 (mod ℓ)`, `p ≤ x`, whose Frobenius lies in
/// `C_{2k}` for the tuple `(b-part, f-part)`, against the share predicted by
/// the Galois image.
pub fn scan_density(
    ell: u64,
    c: &[FactoredRational],
    cache: &PrimeCache,
    x: u64,
    keep_items: bool,
) -> Result<DensityScan, ChebotarevError> {
    check_odd_prime_ell(ell)?;
    cache.ensure(x)?;
    let kummer = lattice::kummer_degree(c, ell)?;
    let class = class_ratio(&ClassSpec::for_tuple(c, ell)?)?;
    let bad = bad_primes(c);
    let candidates: Vec<u64> = cache.primes_up_to(x).iter().copied().filter(|p| p % ell == 1).collect();
    let rows = candidates
        .par_iter()
        .filter(|p| !bad.contains(p))
        .map(|&p| {
            let sample = frobenius_vector_with(&RootsOfUnity::new(p, ell)?, c)?;
            let in_class = in_c2k(&sample.b_vector, ell)?;
            Ok(FrobeniusRow {
                p,
                z: sample.z_vector,
                b: sample.b_vector,
                in_class,
            })
        })
        .collect::<Result<Vec<_>, ChebotarevError>>()?;
    let counted = rows.len() as u64;
    let in_class = rows.iter().filter(|r| r.in_class).count() as u64;
    let observed = if counted == 0 {
        0.0
    } else {
        in_class as f64 / counted as f64
    };
    let expected = class.conditional_density;
    Ok(DensityScan {
        ell,
        x,
        counted,
        skipped: candidates.len() as u64 - counted,
        in_class,
        observed,
        expected,
        deviation: (observed - expected).abs(),
        kummer,
        class,
        items: if keep_items { rows } else { Vec::new() },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitScan {
    pub ell: u64,
    pub x: u64,
    pub counted: u64,
    pub skipped: u64,
    /// Primes where every entry is an `ℓ`-th power residue.
    pub split: u64,
    pub observed: f64,
    /// `ℓ^{-d}` with `d` the Kummer rank.
    pub expected: f64,
}

pub fn split_scan(ell: u64, c: &[FactoredRational], cache: &PrimeCache, x: u64) -> Result<SplitScan, ChebotarevError> {
    check_odd_prime_ell(ell)?;
    cache.ensure(x)?;
    let kummer = lattice::kummer_degree(c, ell)?;
    let bad = bad_primes(c);
    let candidates: Vec<u64> = cache.primes_up_to(x).iter().copied().filter(|p| p % ell == 1).collect();
    let verdicts = candidates
        .par_iter()
        .filter(|p| !bad.contains(p))
        .map(|&p| {
            c.iter().try_fold(true, |acc, v| {
                Ok::<_, ChebotarevError>(acc && modular::ell_power_class(v, ell, p)?.splits_completely)
            })
        })
        .collect::<Result<Vec<bool>, _>>()?;
    let counted = verdicts.len() as u64;
    let split = verdicts.iter().filter(|&&s| s).count() as u64;
    Ok(SplitScan {
        ell,
        x,
        counted,
        skipped: candidates.len() as u64 - counted,
        split,
        observed: if counted == 0 {
            0.0
        } else {
            split as f64 / counted as f64
        },
        expected: 1.0 / (ell as f64).powi(kummer.d as i32),
    })
}

/// `Σ_{p ≤ x} 1/(p-1)²`.
pub fn heuristic_sum(cache: &PrimeCache, x: u64) -> Result<f64, ChebotarevError> {
    cache.ensure(x)?;
    Ok(cache
        .primes_up_to(x)
        .iter()
        .map(|&p| {
            let d = (p - 1) as f64;
            1.0 / (d * d)
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicScan {
    pub x: u64,
    pub pi_x: u64,
    pub witnesses: Vec<u64>,
    /// Primes where `f(n) mod p` lies in the orbit `{n^k mod p}`.
    pub counted: u64,
    /// Primes dividing some `n_i` or a numerator/denominator of `f(n_i)`.
    pub skipped: u64,
    pub heuristic_sum: f64,
    pub members: Vec<u64>,
}

/// Counts primes `p ≤ x` with `f(n_i) ≡ n_i^k (mod p)` for one `k` and all
/// `i`, solved on discrete logs mod `p - 1`.
pub fn heuristic_scan(
    f: &MultiplicativeMap,
    witnesses: &[u64],
    cache: &PrimeCache,
    x: u64,
) -> Result<HeuristicScan, ChebotarevError> {
    cache.ensure(x)?;
    let n: Vec<FactoredRational> = witnesses
        .iter()
        .map(|&w| FactoredRational::from_integer(w as i64).map_err(modular::ModularError::from))
        .collect::<Result<_, _>>()?;
    let fn_: Vec<FactoredRational> = n.iter().map(|v| f.evaluate(v)).collect();
    let bad: BTreeSet<u64> = bad_primes(&n).union(&bad_primes(&fn_)).copied().collect();
    let primes = cache.primes_up_to(x);
    let verdicts = primes
        .par_iter()
        .filter(|p| !bad.contains(p))
        .map(|&p| {
            let dl = DiscreteLog::new(p)?;
            let logs = |xs: &[FactoredRational]| -> Result<Vec<u64>, modular::ModularError> {
                xs.iter().map(|v| dl.log(v.reduce_mod_p(p)?)).collect()
            };
            let member = solve_power_congruences(&logs(&n)?, &logs(&fn_)?, p - 1)?.is_some();
            Ok((p, member))
        })
        .collect::<Result<Vec<_>, ChebotarevError>>()?;
    let members: Vec<u64> = verdicts.iter().filter(|v| v.1).map(|v| v.0).collect();
    Ok(HeuristicScan {
        x,
        pi_x: primes.len() as u64,
        witnesses: witnesses.to_vec(),
        counted: members.len() as u64,
        skipped: (primes.len() - verdicts.len()) as u64,
        heuristic_sum: heuristic_sum(cache, x)?,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebotarev::in_c4;
    use crate::ratfact::Sign;
    use std::collections::BTreeMap;

    fn ints(xs: &[i64]) -> Vec<FactoredRational> {
        xs.iter().map(|&n| FactoredRational::from_integer(n).unwrap()).collect()
    }

    fn table_235() -> MultiplicativeMap {
        let overrides = BTreeMap::from([(2, 5), (3, 7), (5, 11)])
            .into_iter()
            .map(|(q, v)| (q, FactoredRational::from_integer(v).unwrap()))
            .collect();
        MultiplicativeMap::table(Sign::Negative, 1, overrides).unwrap()
    }

    #[test]
    fn density_scan_recount_with_direct_residuosity() {
        // oracle: per prime, decide membership by brute-force cube roots and a
        // search over λ, independent of discrete logs
        let cache = PrimeCache::new(20_000);
        let c = ints(&[2, 3, 5, 7]);
        let scan = scan_density(3, &c, &cache, 20_000, true).unwrap();
        let mut in_class = 0;
        let mut counted = 0;
        for &p in cache.primes() {
            if p % 3 != 1 || p == 7 {
                continue;
            }
            counted += 1;
            let zs: Vec<u64> = [2u64, 3, 5, 7]
                .iter()
                .map(|&a| modular::pow_mod(a, (p - 1) / 3, p))
                .collect();
            // (z_f1, z_f2) = (z_b1, z_b2)^λ for some λ
            let hit = (0..3).any(|l| modular::pow_mod(zs[0], l, p) == zs[2] && modular::pow_mod(zs[1], l, p) == zs[3])
                || (zs[0] == 1 && zs[1] == 1 && zs[2] == 1 && zs[3] == 1);
            in_class += u64::from(hit);
        }
        assert_eq!(scan.counted, counted);
        assert_eq!(scan.in_class, in_class);
        assert_eq!(scan.skipped, 1);
        assert!(scan.items.iter().all(|r| in_c4(&r.b, 3).unwrap() == r.in_class));
    }

    #[test]
    fn split_density_recount() {
        let cache = PrimeCache::new(50_000);
        let scan = split_scan(3, &ints(&[2]), &cache, 50_000).unwrap();
        let brute = cache
            .primes()
            .iter()
            .filter(|&&p| p % 3 == 1)
            .filter(|&&p| (1..p).any(|y| modular::pow_mod(y, 3, p) == 2 % p))
            .count() as u64;
        assert_eq!(scan.split, brute);
        assert_eq!(scan.expected, 1.0 / 3.0);
    }

    #[test]
    fn degenerate_tuple_with_unit_f_part() {
        let cache = PrimeCache::new(100_000);
        let scan = scan_density(3, &ints(&[2, 3, 1, 1]), &cache, 100_000, false).unwrap();
        assert_eq!(scan.observed, 1.0);
        assert_eq!(scan.expected, 1.0);
    }

    #[test]
    fn heuristic_sum_oracle() {
        let cache = PrimeCache::new(100);
        let direct: f64 = (2..=100u64)
            .filter(|&n| (2..n).all(|d| n % d != 0))
            .map(|p| 1.0 / ((p - 1) * (p - 1)) as f64)
            .sum();
        let s = heuristic_sum(&cache, 100).unwrap();
        assert!((s - direct).abs() < 1e-12);
        assert!((s - 1.373).abs() < 1e-3);
    }

    #[test]
    fn heuristic_scan_controls() {
        let cache = PrimeCache::new(20_000);
        let power = MultiplicativeMap::power(3);
        let scan = heuristic_scan(&power, &[2, 3, 5], &cache, 20_000).unwrap();
        assert_eq!(scan.counted + scan.skipped, scan.pi_x);
        assert_eq!(scan.skipped, 3);
        let scan = heuristic_scan(&table_235(), &[2, 3, 5], &cache, 20_000).unwrap();
        assert!(scan.counted * 100 < scan.pi_x);
        // the non-member example from the log-coordinate solver
        assert_eq!(solve_power_congruences(&[1, 8], &[9, 7], 10).unwrap(), None);
    }

    #[test]
    fn heuristic_members_match_brute_force() {
        let cache = PrimeCache::new(3000);
        let f = table_235();
        let scan = heuristic_scan(&f, &[2, 3, 5], &cache, 3000).unwrap();
        let fv = |n: i64| f.evaluate_integer(n).unwrap();
        let brute: Vec<u64> = cache
            .primes()
            .iter()
            .copied()
            .filter(|&p| ![2u64, 3, 5, 7, 11].contains(&p))
            .filter(|&p| {
                (0..p - 1).any(|k| {
                    [2i64, 3, 5]
                        .iter()
                        .all(|&n| fv(n).reduce_mod_p(p).unwrap() == modular::pow_mod(n as u64, k, p))
                })
            })
            .collect();
        assert_eq!(scan.members, brute);
    }
}
