use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p must be an odd prime, got {0}")]
    BadPrime(u64),
    #[error("malformed conductor {0}: {1}")]
    BadConductor(u64, String),
    #[error("field is not totally real: -1 does not lie in the subgroup")]
    NotTotallyReal,
    #[error("{w} is not in the subgroup of order {p}^{n} generated by {g} mod {ell}")]
    NotInSubgroup { ell: u64, g: u64, w: u64, p: u64, n: u32 },
    #[error("{g} is not a primitive root mod {ell}")]
    NotPrimitiveRoot { ell: u64, g: u64 },
    #[error("ambient mismatch between group-ring operands")]
    AmbientMismatch,
    #[error("invalid level n={n}: {requirement}")]
    InvalidLevel { n: u32, requirement: String },
    #[error("{b} does not divide {d}")]
    BadDivisor { b: u64, d: u64 },
    #[error("invalid twist r={0}: r must be odd and >= 3")]
    BadTwist(u64),
    #[error("sum over the decomposition group of (zeta_{m})^{k} is not rational over Q (p={p})")]
    NonRationalTrace { m: u64, k: u64, p: u64 },
    #[error("character order {o} does not divide p-1 = {pm1}")]
    OrderNotDividing { o: u64, pm1: u64 },
    #[error("invalid search configuration: {0}")]
    BadSearchConfig(String),
    #[error("invalid norm-relation prime q={q}: {reason}")]
    BadNormRelation { q: u64, reason: String },
    #[error("group order {0} exceeds the supported cap {1}")]
    GroupTooLarge(u64, u64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
