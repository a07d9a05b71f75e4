//! Multiplicative relations among rational tuples.
//!
//! For `c = (c_1, …, c_m)` the exponent matrix `E_c` has one row per prime in
//! the combined support and one column per entry. Its integer kernel `M_c`
//! lists the relations `c^n = ±1`; its kernel mod `ℓ` lists the relations
//! that hold up to `ℓ`-th powers and fixes the Kummer degree.

pub mod intmat;
pub mod modl;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::modular::{check_odd_prime_ell, ModularError};
use crate::powermap::MultiplicativeMap;
use crate::ratfact::FactoredRational;
use intmat::Matrix;

/// Above this many row subsets the minors are not listed and `δ` comes from
/// the Hermite form instead.
pub const MINOR_ENUMERATION_CAP: u128 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("integer overflow in exact elimination")]
    Overflow,
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error("witness entries must be at least 2, got {0}")]
    SmallWitness(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentLattice {
    support: Vec<u64>,
    matrix: Vec<Vec<i64>>,
    m: usize,
}

impl ExponentLattice {
    pub fn support(&self) -> &[u64] {
        &self.support
    }

    /// `r × m`, rows indexed by [`support`](Self::support).
    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.support.len()
    }

    fn wide(&self) -> Matrix {
        self.matrix
            .iter()
            .map(|row| row.iter().map(|&v| i128::from(v)).collect())
            .collect()
    }

    /// Rank of `E_c` mod `ℓ`, i.e. the `d` in `ℓ^d`.
    pub fn rank_mod(&self, ell: u64) -> usize {
        modl::rank(&self.matrix, ell)
    }
}

pub fn build_lattice(c: &[FactoredRational]) -> ExponentLattice {
    let support: Vec<u64> = c
        .iter()
        .flat_map(|x| x.support())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let matrix = support
        .iter()
        .map(|&p| c.iter().map(|x| x.ord_p(p)).collect())
        .collect();
    ExponentLattice {
        support,
        matrix,
        m: c.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub support: Vec<u64>,
    pub matrix: Vec<Vec<i64>>,
    pub kernel_basis: Vec<Vec<i128>>,
    /// All maximal minors, when `r ≥ m` and there are at most
    /// [`MINOR_ENUMERATION_CAP`] of them.
    pub minors: Option<Vec<i128>>,
    /// Twice the gcd of the maximal minors; absent when they all vanish.
    pub delta: Option<i128>,
}

pub fn relations(lattice: &ExponentLattice) -> Result<RelationReport, LatticeError> {
    let e = lattice.wide();
    let (r, m) = (lattice.r(), lattice.m());
    let kernel_basis = intmat::integer_kernel(&e, m)?;
    let (minors, g) = if r >= m && intmat::binomial(r, m) <= MINOR_ENUMERATION_CAP {
        let minors = intmat::maximal_minors(&e, m)?;
        let g = minors.iter().fold(0, |g, &x| intmat::gcd(g, x));
        (Some(minors), g)
    } else {
        (None, intmat::minor_gcd_via_hnf(&e, m)?)
    };
    let delta = if g == 0 {
        None
    } else {
        Some(g.checked_mul(2).ok_or(LatticeError::Overflow)?)
    };
    Ok(RelationReport {
        support: lattice.support.clone(),
        matrix: lattice.matrix.clone(),
        kernel_basis,
        minors,
        delta,
    })
}

/// `∏ c_j^{n_j}`, exactly.
pub fn evaluate_relation(c: &[FactoredRational], n: &[i128]) -> FactoredRational {
    c.iter()
        .zip(n)
        .fold(FactoredRational::one(), |acc, (x, &e)| acc.mul(&x.pow(e as i64)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KummerDegree {
    pub ell: u64,
    pub m: usize,
    /// Dimension of the relations mod `ℓ`.
    pub dim_v: usize,
    /// `m - dim_v`.
    pub d: usize,
    /// `ℓ^d`.
    #[serde(with = "crate::bigjson")]
    pub degree: BigUint,
}

/// Degree of the Kummer layer generated by `ℓ`-th roots of `c` over the
/// `ℓ`-th cyclotomic field. Signs drop out since `-1` is an `ℓ`-th power.
pub fn kummer_degree(c: &[FactoredRational], ell: u64) -> Result<KummerDegree, LatticeError> {
    check_odd_prime_ell(ell)?;
    let lattice = build_lattice(c);
    let d = lattice.rank_mod(ell);
    Ok(KummerDegree {
        ell,
        m: c.len(),
        dim_v: c.len() - d,
        d,
        degree: BigUint::from(ell).pow(d as u32),
    })
}

/// Basis of the relations mod `ℓ`: `d` with `c^d` an `ℓ`-th power.
pub fn kernel_mod_ell(c: &[FactoredRational], ell: u64) -> Result<Vec<Vec<u64>>, LatticeError> {
    check_odd_prime_ell(ell)?;
    let lattice = build_lattice(c);
    Ok(modl::kernel(&lattice.matrix, c.len(), ell))
}

/// Basis of the annihilator of the relations mod `ℓ` (the row space of
/// `E_c` mod `ℓ`).
pub fn annihilator_mod_ell(c: &[FactoredRational], ell: u64) -> Result<Vec<Vec<u64>>, LatticeError> {
    check_odd_prime_ell(ell)?;
    Ok(modl::row_space(&build_lattice(c).matrix, ell))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FInvariants {
    pub n: (u64, u64),
    /// `(n1, n2, f(n1))`.
    pub tuple: Vec<FactoredRational>,
    pub in_n_f: bool,
    pub delta: Option<i128>,
    /// `|n1 n2 num(f(n1)) den(f(n1)) num(f(n2)) den(f(n2))|`.
    #[serde(with = "crate::bigjson")]
    pub b: BigUint,
}

pub fn f_invariants(f: &MultiplicativeMap, n1: u64, n2: u64) -> Result<FInvariants, LatticeError> {
    for n in [n1, n2] {
        if n < 2 {
            return Err(LatticeError::SmallWitness(n));
        }
    }
    let as_rational = |n: u64| FactoredRational::from_integer(n as i64).map_err(ModularError::from);
    let (x1, x2) = (as_rational(n1)?, as_rational(n2)?);
    let (f1, f2) = (f.evaluate(&x1), f.evaluate(&x2));
    let b =
        BigUint::from(n1) * BigUint::from(n2) * f1.numerator() * f1.denominator() * f2.numerator() * f2.denominator();
    let tuple = vec![x1, x2, f1];
    let report = relations(&build_lattice(&tuple))?;
    Ok(FInvariants {
        n: (n1, n2),
        tuple,
        in_n_f: report.kernel_basis.is_empty(),
        delta: report.delta,
        b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AfCandidate {
    pub n: (u64, u64),
    pub delta: i128,
    #[serde(with = "crate::bigjson")]
    pub b: BigUint,
    /// `log max{δ, e^b}`.
    pub log_value: f64,
}

/// Minimises `max{δ_{f,n}, e^{b_{f,n}}}` over `2 ≤ n1, n2 ≤ limit` with
/// `n ∈ N_f`. Only a finite search, so an upper bound for the true minimum.
pub fn a_f_search(f: &MultiplicativeMap, limit: u64) -> Result<Option<AfCandidate>, LatticeError> {
    let mut best: Option<AfCandidate> = None;
    for n1 in 2..=limit {
        for n2 in 2..=limit {
            let inv = f_invariants(f, n1, n2)?;
            let Some(delta) = inv.delta.filter(|_| inv.in_n_f) else {
                continue;
            };
            let b = inv.b.to_f64().unwrap_or(f64::INFINITY);
            let log_value = (delta as f64).ln().max(b);
            if best.as_ref().is_none_or(|cur| log_value < cur.log_value) {
                best = Some(AfCandidate {
                    n: (n1, n2),
                    delta,
                    b: inv.b,
                    log_value,
                });
            }
        }
    }
    Ok(best)
}
