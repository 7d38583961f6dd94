use thiserror::Error;

use pqw_fpgroup::FpError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group order {order} exceeds the configured limit {limit}")]
    OrderLimit { order: u128, limit: u64 },
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("matrix is not invertible modulo {modulus}")]
    NotInvertible { modulus: u64 },
    #[error("group is not homocyclic abelian Z_m^k")]
    NotHomocyclic,
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("invalid branch data: {0}")]
    InvalidBranchData(String),
    #[error("generating vector has {found} images, expected {expected}")]
    VectorLength { expected: usize, found: usize },
    #[error("long relator maps to {value}, not the identity")]
    LongRelatorFails { value: String },
    #[error("image of c{k} has order {found}, expected branch index {expected}")]
    BranchOrderFails { k: usize, expected: u32, found: u64 },
    #[error("images generate a subgroup of order {generated}, not the whole group of order {order}")]
    NotSurjective { generated: usize, order: usize },
    #[error("Riemann-Hurwitz gives a non-integral or negative genus: {0}")]
    InconsistentBranching(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("factor {factor} has genus {genus} < 2")]
    SmallGenus { factor: usize, genus: u64 },
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    Budget { needed: u128, budget: u64 },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("inconsistent epimorphisms: {0}")]
    InconsistentEpimorphisms(String),
    #[error("order of the fundamental group is not certified")]
    Uncertified,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Fp(#[from] FpError),
}

pub type Result<T> = std::result::Result<T, Error>;
