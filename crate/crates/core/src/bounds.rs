//! Explicit discriminant and density bounds.
//!
//! Every unknown constant (`c1`, `c2`, the implied constant of the main term)
//! is configuration, defaulting to 1, and is echoed in every report.

use std::f64::consts::E;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use thiserror::Error;

use crate::modular::{check_odd_prime_ell, factor_u64, ModularError, PrimeCache, DEFAULT_TRIAL_BOUND};
use crate::ratfact::FactoredRational;

/// Largest `n` for which the cyclotomic discriminant is built exactly.
pub const EXACT_DISCRIMINANT_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error("{name} must be positive and finite, got {value}")]
    BadConstant { name: &'static str, value: f64 },
    #[error("x = {x} is too small: the iterated logarithms need x > {min_x}")]
    ScheduleDomain { x: f64, min_x: f64 },
    #[error("n must be at least 1")]
    ZeroModulus,
    #[error("exact discriminant only for n ≤ {limit}, got {n}")]
    TooLargeForExact { n: u64, limit: u64 },
    #[error("need 3 ≤ Y ≤ Z, got Y = {y}, Z = {z}")]
    MertensRange { y: f64, z: f64 },
    #[error("Z must be at least 2, got {0}")]
    SmallZ(f64),
    #[error("x must be at least 2, got {0}")]
    SmallX(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConfig {
    /// Chebyshev constant with `∏_{ℓ ≤ Z} ℓ ≤ e^{MZ}`.
    #[serde(rename = "M")]
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    pub implied_constant: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self {
            m: 4f64.ln(),
            c1: 1.0,
            c2: 1.0,
            implied_constant: 1.0,
        }
    }
}

impl BoundConfig {
    pub fn validate(&self) -> Result<(), BoundsError> {
        for (name, value) in [
            ("M", self.m),
            ("c1", self.c1),
            ("c2", self.c2),
            ("implied_constant", self.implied_constant),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(BoundsError::BadConstant { name, value });
            }
        }
        Ok(())
    }
}

fn factor(n: u64) -> Result<Vec<(u64, u32)>, BoundsError> {
    Ok(factor_u64(n, DEFAULT_TRIAL_BOUND)?)
}

pub fn euler_phi(n: u64) -> Result<u64, BoundsError> {
    if n == 0 {
        return Err(BoundsError::ZeroModulus);
    }
    Ok(factor(n)?.iter().fold(n, |acc, &(p, _)| acc / p * (p - 1)))
}

/// `(-1)^{φ(n)/2} n^{φ(n)} / ∏_{p | n} p^{φ(n)/(p-1)}`, with `n = 1, 2`
/// giving 1.
pub fn cyclotomic_discriminant(n: u64) -> Result<BigInt, BoundsError> {
    if n == 0 {
        return Err(BoundsError::ZeroModulus);
    }
    if n > EXACT_DISCRIMINANT_LIMIT {
        return Err(BoundsError::TooLargeForExact {
            n,
            limit: EXACT_DISCRIMINANT_LIMIT,
        });
    }
    if n <= 2 {
        return Ok(BigInt::from(1));
    }
    let phi = euler_phi(n)?;
    let mut num = BigUint::from(n).pow(phi as u32);
    for (p, _) in factor(n)? {
        num /= BigUint::from(p).pow((phi / (p - 1)) as u32);
    }
    let value = BigInt::from(num);
    Ok(if (phi / 2) % 2 == 1 { -value } else { value })
}

/// `(sign, log|d|)` for the `n`-th cyclotomic field, any `n ≥ 1`.
pub fn cyclotomic_discriminant_log(n: u64) -> Result<(i8, f64), BoundsError> {
    if n == 0 {
        return Err(BoundsError::ZeroModulus);
    }
    if n <= 2 {
        return Ok((1, 0.0));
    }
    let phi = euler_phi(n)?;
    let mut log = phi as f64 * (n as f64).ln();
    for (p, _) in factor(n)? {
        log -= (phi / (p - 1)) as f64 * (p as f64).ln();
    }
    Ok((if (phi / 2) % 2 == 1 { -1 } else { 1 }, log))
}

/// `max{log|d|, |d|^{1/degree}}` from `log|d|`.
pub fn max_term(log_abs_disc: f64, degree: u64) -> f64 {
    log_abs_disc.max((log_abs_disc / degree as f64).exp())
}

/// Log of the divisor bound for the discriminant of the Kummer field of
/// rank `d` over `Q(ζ_ℓ)`:
/// `(ℓ-1)² ℓ^{d-1} (Σ log(num·den) + (d+1) log ℓ)`.
/// For `d = 0` this is `log|d|` of the `ℓ`-th cyclotomic field.
pub fn kummer_disc_log_bound(ell: u64, d: u32, c: &[FactoredRational]) -> Result<f64, BoundsError> {
    check_odd_prime_ell(ell)?;
    let l = ell as f64;
    if d == 0 {
        return Ok(cyclotomic_discriminant_log(ell)?.1);
    }
    let sum: f64 = c.iter().map(FactoredRational::log_num_den).sum();
    Ok((l - 1.0).powi(2) * l.powi(d as i32 - 1) * (sum + (d as f64 + 1.0) * l.ln()))
}

/// `√(log x / degree) ≥ c2 · max_term`.
pub fn chebotarev_condition(x: f64, degree: u64, max_term: f64, cfg: &BoundConfig) -> Result<bool, BoundsError> {
    if !(x >= 2.0) {
        return Err(BoundsError::SmallX(x));
    }
    Ok((x.ln() / degree as f64).sqrt() >= cfg.c2 * max_term)
}

/// Smallest `x` for which the schedule is defined: `e^{e^e}`.
pub fn schedule_threshold() -> f64 {
    E.powf(E).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    pub x: f64,
    /// `logloglog x / (loglogloglog x)²`.
    pub y: f64,
    /// `loglog x / (3M + 1)`.
    pub z: f64,
    /// `(log x / (6 c2 loglog x)²)^{1/15}`.
    pub z_cap: f64,
    pub z_within_cap: bool,
    pub y_exceeds_z: bool,
}

pub fn yz_schedule(x: f64, cfg: &BoundConfig) -> Result<Schedule, BoundsError> {
    cfg.validate()?;
    let min_x = schedule_threshold();
    if !(x > min_x) {
        return Err(BoundsError::ScheduleDomain { x, min_x });
    }
    let l1 = x.ln();
    let l2 = l1.ln();
    let l3 = l2.ln();
    let l4 = l3.ln();
    let y = l3 / (l4 * l4);
    let z = l2 / (3.0 * cfg.m + 1.0);
    let z_cap = (l1 / (6.0 * cfg.c2 * l2).powi(2)).powf(1.0 / 15.0);
    Ok(Schedule {
        x,
        y,
        z,
        z_cap,
        z_within_cap: z <= z_cap,
        y_exceeds_z: y > z,
    })
}

/// `∏_{Y ≤ ℓ < Z, ℓ odd prime} (1 - 1/(ℓ-1))`.
pub fn mertens_product(y: f64, z: f64, cache: &PrimeCache) -> Result<f64, BoundsError> {
    if !(y >= 3.0 && y <= z) {
        return Err(BoundsError::MertensRange { y, z });
    }
    cache.ensure(z.ceil() as u64)?;
    Ok(cache
        .primes_in(y.ceil() as u64, z.ceil() as u64)
        .iter()
        .filter(|&&l| l > 2 && (l as f64) < z)
        .map(|&l| 1.0 - 1.0 / (l as f64 - 1.0))
        .product())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevCheck {
    pub z: f64,
    /// `Σ_{ℓ ≤ Z} log ℓ`.
    pub log_product: f64,
    /// `M Z`.
    pub bound: f64,
    pub holds: bool,
}

pub fn chebyshev_check(z: f64, cfg: &BoundConfig, cache: &PrimeCache) -> Result<ChebyshevCheck, BoundsError> {
    cfg.validate()?;
    if !(z >= 2.0) {
        return Err(BoundsError::SmallZ(z));
    }
    let top = z.floor() as u64;
    cache.ensure(top)?;
    let log_product: f64 = cache.primes_up_to(top).iter().map(|&l| (l as f64).ln()).sum();
    let bound = cfg.m * z;
    Ok(ChebyshevCheck {
        z,
        log_product,
        bound,
        holds: log_product <= bound,
    })
}

/// Checks `θ(Z) ≤ MZ` for every real `Z ∈ [2, z_max]`. Between primes `θ`
/// is flat while `MZ` grows, so testing at each prime suffices. Returns the
/// first prime where it fails.
pub fn chebyshev_scan(z_max: u64, cfg: &BoundConfig, cache: &PrimeCache) -> Result<Option<u64>, BoundsError> {
    cfg.validate()?;
    cache.ensure(z_max)?;
    let mut theta = 0.0;
    for &l in cache.primes_up_to(z_max) {
        theta += (l as f64).ln();
        if theta > cfg.m * l as f64 {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainBound {
    pub x: f64,
    pub pi_x: f64,
    pub b_f: f64,
    /// `loglogloglog x / logloglog x`.
    pub ratio: f64,
    /// `ratio · π(x) · implied_constant`.
    pub main_term: f64,
    /// `main_term + b_f`.
    pub total: f64,
    /// `(log Y / log Z) · π(x)`.
    pub mertens_term: f64,
    /// `π(x) / (Y log Y) + b_f`.
    pub tail_term: f64,
    pub sieve_total: f64,
    pub schedule: Schedule,
    pub config: BoundConfig,
}

/// `loglogloglog x / logloglog x` from `log x`, so `x` may exceed the
/// floating-point range.
pub fn ratio_term(log_x: f64) -> Result<f64, BoundsError> {
    let min_log = E.powf(E);
    if !(log_x > min_log) {
        return Err(BoundsError::ScheduleDomain {
            x: log_x.exp(),
            min_x: min_log.exp(),
        });
    }
    let l3 = log_x.ln().ln();
    Ok(l3.ln() / l3)
}

pub fn main_bound(x: f64, pi_x: f64, b_f: f64, cfg: &BoundConfig) -> Result<MainBound, BoundsError> {
    let schedule = yz_schedule(x, cfg)?;
    let ratio = ratio_term(x.ln())?;
    let main_term = ratio * pi_x * cfg.implied_constant;
    let (y, z) = (schedule.y, schedule.z);
    let mertens_term = y.ln() / z.ln() * pi_x;
    let tail_term = pi_x / (y * y.ln()) + b_f;
    Ok(MainBound {
        x,
        pi_x,
        b_f,
        ratio,
        main_term,
        total: main_term + b_f,
        mertens_term,
        tail_term,
        sieve_total: mertens_term + tail_term,
        schedule,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cyclotomic_table() {
        let table = [
            (1u64, 1i64),
            (2, 1),
            (3, -3),
            (4, -4),
            (5, 125),
            (7, -16807),
            (8, 256),
            (12, 144),
        ];
        for (n, d) in table {
            assert_eq!(cyclotomic_discriminant(n).unwrap(), BigInt::from(d), "n={n}");
        }
        assert!(matches!(
            cyclotomic_discriminant(10_001),
            Err(BoundsError::TooLargeForExact { .. })
        ));
    }

    #[test]
    fn cyclotomic_log_form_agrees_with_exact() {
        for n in 1..=300u64 {
            let exact = cyclotomic_discriminant(n).unwrap();
            let (sign, log) = cyclotomic_discriminant_log(n).unwrap();
            assert_eq!(exact.sign() == num_bigint::Sign::Minus, sign < 0, "n={n}");
            let bits = exact.magnitude().bits() as f64;
            // log|d| within the binary length bracket
            assert!(
                log <= bits * 2f64.ln() + 1e-9 && log >= (bits - 1.0) * 2f64.ln() - 1e-9,
                "n={n}"
            );
        }
    }

    #[test]
    fn kummer_bound_examples() {
        let two = [FactoredRational::from_integer(2).unwrap()];
        assert_relative_eq!(
            kummer_disc_log_bound(3, 1, &two).unwrap(),
            (16.0f64 * 6561.0).ln(),
            epsilon = 1e-9
        );
        let c: Vec<_> = [2, 3, 5, 7]
            .iter()
            .map(|&n| FactoredRational::from_integer(n).unwrap())
            .collect();
        let v = kummer_disc_log_bound(5, 4, &c).unwrap();
        assert_relative_eq!(v, 2000.0 * 210f64.ln() + 10000.0 * 5f64.ln(), epsilon = 1e-6);
        assert!((v - 26788.0).abs() < 1.0);
        let one = [FactoredRational::one()];
        assert_relative_eq!(
            kummer_disc_log_bound(3, 1, &one).unwrap(),
            8.0 * 3f64.ln(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            kummer_disc_log_bound(5, 0, &[]).unwrap(),
            3.0 * 5f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn kummer_bound_under_small_radicands() {
        // with d ≥ 3 and log ℓ ≥ ∏ num·den the bound stays below 6 ℓ⁵ log ℓ
        let samples: Vec<Vec<FactoredRational>> = vec![
            vec![FactoredRational::one(); 3],
            vec![FactoredRational::one(); 4],
            vec![
                FactoredRational::minus_one(),
                FactoredRational::one(),
                FactoredRational::one(),
            ],
            vec![
                FactoredRational::from_integer(2).unwrap(),
                FactoredRational::one(),
                FactoredRational::one(),
            ],
            vec![
                FactoredRational::factor(1, 2).unwrap(),
                FactoredRational::one(),
                FactoredRational::one(),
                FactoredRational::one(),
            ],
        ];
        let mut checked = 0;
        for ell in [5u64, 7, 11, 13] {
            for c in &samples {
                let b: f64 = c.iter().map(|x| x.log_num_den().exp()).product();
                let d = c.len() as u32;
                if d >= 3 && (ell as f64).ln() >= b {
                    let l = ell as f64;
                    assert!(kummer_disc_log_bound(ell, d.min(4), c).unwrap() <= 6.0 * l.powi(5) * l.ln());
                    checked += 1;
                }
            }
        }
        assert!(checked >= 12);
    }

    #[test]
    fn condition_examples() {
        let cfg = BoundConfig::default();
        assert!(chebotarev_condition(100f64.exp(), 4, 2.0, &cfg).unwrap());
        assert!(!chebotarev_condition(4f64.exp(), 4, 2.0, &cfg).unwrap());
        assert!(chebotarev_condition(3.0, 4, 0.0, &cfg).unwrap());
        assert_eq!(max_term(0.0, 4), 1.0);
    }

    #[test]
    fn schedule_at_googol() {
        let s = yz_schedule(1e100, &BoundConfig::default()).unwrap();
        assert!((s.y - 6.10).abs() < 0.01);
        assert!((s.z - 1.054).abs() < 0.001);
        assert!(s.y_exceeds_z);
    }

    #[test]
    fn schedule_domain() {
        let cfg = BoundConfig::default();
        assert!(matches!(
            yz_schedule(1e6, &cfg),
            Err(BoundsError::ScheduleDomain { .. })
        ));
        assert!(yz_schedule(1e8, &cfg).is_ok());
        let small_m = BoundConfig { m: 1e-12, ..cfg };
        let s = yz_schedule(1e100, &small_m).unwrap();
        assert_relative_eq!(s.z, 1e100f64.ln().ln(), max_relative = 1e-9);
    }

    #[test]
    fn mertens_examples() {
        let cache = PrimeCache::new(100_000);
        let v = mertens_product(5.0, 20.0, &cache).unwrap();
        let direct: f64 = [5.0, 7.0, 11.0, 13.0, 17.0, 19.0]
            .iter()
            .map(|l: &f64| 1.0 - 1.0 / (l - 1.0))
            .product();
        assert_relative_eq!(v, direct, epsilon = 1e-15);
        assert!((v - 0.456543).abs() < 1e-6);
        assert_eq!(mertens_product(7.0, 7.0, &cache).unwrap(), 1.0);
        assert_eq!(mertens_product(3.0, 5.0, &cache).unwrap(), 0.5);
        assert!(matches!(
            mertens_product(2.0, 5.0, &cache),
            Err(BoundsError::MertensRange { .. })
        ));
        let ratio = mertens_product(50.0, 1e5, &cache).unwrap() * (1e5f64.ln() / 50f64.ln());
        assert!((0.3..=3.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn chebyshev_examples() {
        let cfg = BoundConfig::default();
        let cache = PrimeCache::new(1000);
        let c = chebyshev_check(10.0, &cfg, &cache).unwrap();
        assert_relative_eq!(c.log_product, 210f64.ln(), epsilon = 1e-12);
        assert!(c.holds);
        assert!(chebyshev_check(2.0, &cfg, &cache).unwrap().holds);
        assert_eq!(chebyshev_scan(1000, &cfg, &cache).unwrap(), None);
        let tight = BoundConfig { m: 0.5, ..cfg };
        assert_eq!(chebyshev_scan(1000, &tight, &cache).unwrap(), Some(3));
    }

    #[test]
    fn cyclotomic_max_term_against_chebyshev() {
        let cfg = BoundConfig::default();
        let cache = PrimeCache::new(100);
        for z in 2..=30u64 {
            let n: u64 = cache.primes_up_to(z).iter().product();
            let (_, log) = cyclotomic_discriminant_log(n).unwrap();
            let mz = cfg.m * z as f64;
            assert!(max_term(log, euler_phi(n).unwrap()) <= mz * mz.exp(), "Z={z}");
        }
    }

    #[test]
    fn main_bound_at_1e8() {
        let b = main_bound(1e8, 5_761_455.0, 10.0, &BoundConfig::default()).unwrap();
        assert!((b.main_term / (0.0626 * 5_761_455.0) - 1.0).abs() < 0.005);
        assert_eq!(b.total, b.main_term + 10.0);
        assert!(matches!(
            main_bound(100.0, 25.0, 0.0, &BoundConfig::default()),
            Err(BoundsError::ScheduleDomain { .. })
        ));
        let g = main_bound(1e100, 1.0, 0.0, &BoundConfig::default()).unwrap();
        assert!((g.ratio - 0.311).abs() < 0.001);
    }

    #[test]
    fn ratio_decreases_in_x() {
        // d/du (ln u / u) < 0 exactly when u = logloglog x > e, i.e. above
        // log x = e^{e^e}; sample log x on both sides of that turning point
        let turn = E.powf(E).exp();
        let above = [turn * 1.01, 1e7, 1e10, 1e20, 1e50, 1e100, 1e300];
        let r: Vec<f64> = above.iter().map(|&l| ratio_term(l).unwrap()).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
        let below = [16.0, 100.0, 1e3, 1e5, turn * 0.99];
        let r: Vec<f64> = below.iter().map(|&l| ratio_term(l).unwrap()).collect();
        assert!(r.windows(2).all(|w| w[1] > w[0]), "{r:?}");
        assert!(ratio_term(10.0).is_err());
    }

    #[test]
    fn bad_config_is_rejected() {
        let cfg = BoundConfig {
            c2: 0.0,
            ..BoundConfig::default()
        };
        assert!(matches!(
            yz_schedule(1e100, &cfg),
            Err(BoundsError::BadConstant { name: "c2", .. })
        ));
    }
}
