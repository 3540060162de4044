//! Exact representation theory of `S_n` and `SU(d)`.

mod branching;
mod characters;
mod kronecker;
mod partition;
mod unitary;

pub use branching::{
    branch_decompose, branching_multiplicity, certify_holistic, pad, strip_columns,
    trivial_multiplicity, BranchTerm, CertificateMethod, HolismCertificate, Verdict,
};
pub use characters::{
    cache_dir_from_env, cache_files, character_degree, character_row, clear_cache_dir,
    mn_character, CharacterCache, CACHE_DIR_ENV, DEFAULT_CACHE_DIR,
};
pub use kronecker::kronecker;
pub use partition::{class_size, partitions, sym_dim, Partition};
pub use unitary::{born_rep_partition, dim_dj, enumerate_k_values, su_dim, KValues};

use num_bigint::BigUint;
use serde::Serializer;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("{0:?} is not a weakly decreasing sequence of positive integers")]
    NotAPartition(Vec<usize>),
    #[error("cannot parse partition from {0:?}")]
    Parse(String),
    #[error("partition sizes differ: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("cannot pad {partition} to {target} boxes with columns of height {rows}")]
    NonIntegerPadding {
        partition: Partition,
        rows: usize,
        target: usize,
    },
    #[error("{partition} has more than {max_rows} rows")]
    TooManyRows {
        partition: Partition,
        max_rows: usize,
    },
    #[error("partition of {0} is too large for the character engine")]
    TooLarge(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("character cache: {0}")]
    Cache(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Exact integers are written as decimal strings in JSON.
pub(crate) fn serialize_decimal<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_string())
}

pub(crate) fn serialize_optional_decimal<S: Serializer>(
    value: &Option<BigUint>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}
