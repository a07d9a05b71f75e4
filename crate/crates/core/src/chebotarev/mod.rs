//! Frobenius classes in Kummer extensions at primes `p ≡ 1 (mod ℓ)`.
//!
//! Over such a prime the Frobenius of `Q(ζ_ℓ, c^{1/ℓ})` lies in the fiber
//! `a = 1` of the group `{(a, v)}` with `(a1, v1)(a2, v2) = (a1 a2, v2 + a2 v1)`.
//! Its class is read off from `z_c = c^{(p-1)/ℓ} mod p`: taking logs in
//! `μ_ℓ` gives a vector `b`, and conjugation only rescales `b` by a unit, so
//! the class is the projective vector.

mod scan;

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{self, LatticeError};
use crate::modular::{self, check_odd_prime_ell, check_split_prime, inv_mod, ModularError};
use crate::powermap::PowerMapError;
use crate::ratfact::FactoredRational;

pub use scan::{
    heuristic_scan, heuristic_sum, scan_density, split_scan, DensityScan, FrobeniusRow, HeuristicScan, SplitScan,
};

/// Largest `ℓ` for which a non-full image is enumerated.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 13;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChebotarevError {
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    PowerMap(#[from] PowerMapError),
    #[error("{p} is ramified in the {n}-th cyclotomic field")]
    Ramified { p: u64, n: u64 },
    #[error("cyclotomic modulus must be at least 3, got {0}")]
    SmallModulus(u64),
    #[error("expected a vector of length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("ell = {ell} exceeds the enumeration bound {bound}")]
    TooLargeToEnumerate { ell: u64, bound: u64 },
    #[error("{zeta} does not generate the {ell}-th roots of unity mod {p}")]
    NotRootOfUnityGenerator { zeta: u64, ell: u64, p: u64 },
}

/// Frobenius of `p` in `Gal(Q(ζ_n)/Q) ≅ (Z/nZ)^×`.
pub fn cyclotomic_frobenius(p: u64, n: u64) -> Result<u64, ChebotarevError> {
    if n < 3 {
        return Err(ChebotarevError::SmallModulus(n));
    }
    if modular::gcd(p, n) != 1 {
        return Err(ChebotarevError::Ramified { p, n });
    }
    Ok(p % n)
}

/// A generator `ζ` of `μ_ℓ ⊂ (Z/pZ)^×` with its power table.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    p: u64,
    ell: u64,
    powers: Vec<u64>,
}

impl RootsOfUnity {
    /// `ζ = x^{(p-1)/ℓ}` for the smallest `x` where that is not 1.
    pub fn new(p: u64, ell: u64) -> Result<Self, ChebotarevError> {
        check_split_prime(p, ell)?;
        let e = (p - 1) / ell;
        let zeta = (2..p)
            .map(|x| modular::pow_mod(x, e, p))
            .find(|&z| z != 1)
            .expect("μ_ℓ is nontrivial when ℓ | p - 1");
        Ok(Self::build(p, ell, zeta))
    }

    pub fn with_generator(zeta: u64, p: u64, ell: u64) -> Result<Self, ChebotarevError> {
        check_split_prime(p, ell)?;
        let zeta = zeta % p;
        if zeta <= 1 || modular::pow_mod(zeta, ell, p) != 1 {
            return Err(ChebotarevError::NotRootOfUnityGenerator { zeta, ell, p });
        }
        Ok(Self::build(p, ell, zeta))
    }

    fn build(p: u64, ell: u64, zeta: u64) -> Self {
        let mut powers = Vec::with_capacity(ell as usize);
        let mut acc = 1;
        for _ in 0..ell {
            powers.push(acc);
            acc = modular::mul_mod(acc, zeta, p);
        }
        Self { p, ell, powers }
    }

    pub fn generator(&self) -> u64 {
        self.powers[1]
    }

    /// `i` with `ζ^i = z`, if `z ∈ μ_ℓ`.
    pub fn log(&self, z: u64) -> Option<u64> {
        self.powers.iter().position(|&w| w == z).map(|i| i as u64)
    }

    /// All elements of `μ_ℓ` other than 1 generate it.
    pub fn all_generators(&self) -> impl Iterator<Item = u64> + '_ {
        self.powers[1..].iter().copied()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }
}

/// Scales `v` mod `ℓ` so its first nonzero entry is 1; zero stays zero.
pub fn normalize_projective(v: &[u64], ell: u64) -> Vec<u64> {
    match v.iter().find(|&&x| x % ell != 0) {
        None => vec![0; v.len()],
        Some(&lead) => {
            let inv = inv_mod(lead % ell, ell).expect("ℓ is prime");
            v.iter().map(|&x| x % ell * inv % ell).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrobeniusSample {
    pub p: u64,
    pub ell: u64,
    /// `c_j^{(p-1)/ℓ} mod p`.
    pub z_vector: Vec<u64>,
    /// Logs of `z_vector` in `μ_ℓ`, projectively normalized.
    pub b_vector: Vec<u64>,
}

/// Raw `z_c = c^{(p-1)/ℓ} mod p` for every entry.
pub fn z_vector(p: u64, ell: u64, c: &[FactoredRational]) -> Result<Vec<u64>, ChebotarevError> {
    check_split_prime(p, ell)?;
    c.iter().map(|x| Ok(modular::ell_power_class(x, ell, p)?.z)).collect()
}

pub fn frobenius_vector(p: u64, ell: u64, c: &[FactoredRational]) -> Result<FrobeniusSample, ChebotarevError> {
    frobenius_vector_with(&RootsOfUnity::new(p, ell)?, c)
}

pub fn frobenius_vector_with(mu: &RootsOfUnity, c: &[FactoredRational]) -> Result<FrobeniusSample, ChebotarevError> {
    let (p, ell) = (mu.p(), mu.ell());
    let z = z_vector(p, ell, c)?;
    let logs: Vec<u64> = z.iter().map(|&w| mu.log(w).expect("z^ℓ = 1")).collect();
    Ok(FrobeniusSample {
        p,
        ell,
        b_vector: normalize_projective(&logs, ell),
        z_vector: z,
    })
}

/// `(b, f)` with `f = λ b` for some `λ` mod `ℓ`; `v` is `b` followed by `f`.
pub fn in_c2k(v: &[u64], ell: u64) -> Result<bool, ChebotarevError> {
    if v.len() % 2 != 0 {
        return Err(ChebotarevError::WrongLength {
            expected: v.len() + 1,
            got: v.len(),
        });
    }
    let k = v.len() / 2;
    let (b, f) = (&v[..k], &v[k..]);
    let Some(i) = b.iter().position(|&x| x % ell != 0) else {
        return Ok(f.iter().all(|&x| x % ell == 0));
    };
    let lambda = f[i] % ell * inv_mod(b[i] % ell, ell).expect("ℓ is prime") % ell;
    Ok(b.iter().zip(f).all(|(&x, &y)| lambda * (x % ell) % ell == y % ell))
}

pub fn in_c4(v: &[u64], ell: u64) -> Result<bool, ChebotarevError> {
    if v.len() != 4 {
        return Err(ChebotarevError::WrongLength {
            expected: 4,
            got: v.len(),
        });
    }
    in_c2k(v, ell)
}

/// Element `(a, v)` of `F_ℓ^× ⋉ F_ℓ^n`.
pub type GroupElement = (u64, Vec<u64>);

pub fn group_mul(x: &GroupElement, y: &GroupElement, ell: u64) -> GroupElement {
    let (a1, v1) = x;
    let (a2, v2) = y;
    let v = v1.iter().zip(v2).map(|(&b1, &b2)| (b2 + a2 * b1) % ell).collect();
    (a1 * a2 % ell, v)
}

pub fn group_inv(x: &GroupElement, ell: u64) -> GroupElement {
    let (a, v) = x;
    let ai = inv_mod(*a, ell).expect("unit");
    (ai, v.iter().map(|&b| (ell - ai * b % ell) % ell).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassImage {
    /// The whole fiber `F_ℓ^{2k}`.
    Full,
    /// A proper subspace, given by a basis.
    Subspace { basis: Vec<Vec<u64>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassSpec {
    pub ell: u64,
    /// Half the vector length.
    pub k: usize,
    pub image: ClassImage,
}

impl ClassSpec {
    pub fn full(ell: u64, k: usize) -> Self {
        Self {
            ell,
            k,
            image: ClassImage::Full,
        }
    }

    /// The image over `a = 1` for a tuple of even length: the row space of its
    /// exponent matrix mod `ℓ`.
    pub fn for_tuple(c: &[FactoredRational], ell: u64) -> Result<Self, ChebotarevError> {
        if c.len() % 2 != 0 {
            return Err(ChebotarevError::WrongLength {
                expected: c.len() + 1,
                got: c.len(),
            });
        }
        let basis = lattice::annihilator_mod_ell(c, ell)?;
        let image = if basis.len() == c.len() {
            ClassImage::Full
        } else {
            ClassImage::Subspace { basis }
        };
        Ok(Self {
            ell,
            k: c.len() / 2,
            image,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassRatio {
    pub ell: u64,
    pub size_c: u128,
    pub fiber: u128,
    pub group: u128,
    /// `size_c / fiber`, the expected share of primes `p ≡ 1 (mod ℓ)`.
    pub conditional_density: f64,
    /// `size_c / group`.
    pub ratio: f64,
    /// `2 / (ℓ (ℓ - 1))`.
    pub share_bound: f64,
    pub within_share_bound: bool,
}

impl ClassRatio {
    fn new(ell: u64, size_c: u128, fiber: u128) -> Self {
        let group = fiber * (ell as u128 - 1);
        let ratio = size_c as f64 / group as f64;
        let share_bound = 2.0 / (ell as f64 * (ell as f64 - 1.0));
        Self {
            ell,
            size_c,
            fiber,
            group,
            conditional_density: size_c as f64 / fiber as f64,
            ratio,
            share_bound,
            // exact: size_c · ℓ(ℓ-1) ≤ 2 · group
            within_share_bound: size_c * (ell as u128) * (ell as u128 - 1) <= 2 * group,
        }
    }
}

pub fn class_ratio(spec: &ClassSpec) -> Result<ClassRatio, ChebotarevError> {
    class_ratio_bounded(spec, DEFAULT_ENUMERATION_BOUND)
}

pub fn class_ratio_bounded(spec: &ClassSpec, bound: u64) -> Result<ClassRatio, ChebotarevError> {
    let ell = spec.ell;
    check_odd_prime_ell(ell)?;
    match &spec.image {
        ClassImage::Full => {
            let l = ell as u128;
            let lk = l.pow(spec.k as u32);
            Ok(ClassRatio::new(ell, 1 + (lk - 1) * l, lk * lk))
        }
        ClassImage::Subspace { basis } => {
            if ell > bound {
                return Err(ChebotarevError::TooLargeToEnumerate { ell, bound });
            }
            enumerate_class(basis, 2 * spec.k, ell)
        }
    }
}

/// Counts `C_{2k}` inside the span of `basis` by listing every element.
pub fn enumerate_class(basis: &[Vec<u64>], len: usize, ell: u64) -> Result<ClassRatio, ChebotarevError> {
    let elements = lattice::modl::span(basis, len, ell);
    let mut size = 0u128;
    for v in &elements {
        if in_c2k(v, ell)? {
            size += 1;
        }
    }
    Ok(ClassRatio::new(ell, size, elements.len() as u128))
}
