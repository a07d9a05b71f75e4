//! Local power maps on the rationals: exact and empirical detection of the
//! primes where a completely multiplicative map acts as `x ↦ x^k`, relation
//! lattices and Kummer degrees of rational tuples, Frobenius statistics at
//! split primes, and evaluators for explicit discriminant and density bounds.

pub mod bounds;
pub mod chebotarev;
pub mod cli;
pub mod lattice;
pub mod modular;
pub mod powermap;
pub mod ratfact;

/// Runs `job` on a dedicated rayon pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(job)
}

pub(crate) mod bigjson {
    use num_bigint::BigUint;
    use serde::{Serialize, Serializer};

    /// Serializes as a JSON number of any size.
    pub fn serialize<S: Serializer>(value: &BigUint, serializer: S) -> Result<S::Ok, S::Error> {
        let number: serde_json::Number = value.to_string().parse().map_err(serde::ser::Error::custom)?;
        number.serialize(serializer)
    }
}
