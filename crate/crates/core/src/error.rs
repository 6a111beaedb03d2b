// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("progression parameter {0} must be odd and squarefree")]
    BadProgressionModulus(u64),
    #[error("residue {residue} mod {modulus} contains no fundamental discriminant")]
    InadmissibleResidue { residue: i64, modulus: u64 },
    #[error("form ({a}, {b}, {c}) is not primitive")]
    NotPrimitive { a: i64, b: i64, c: i64 },
    #[error("discriminant {0} is a perfect square or zero")]
    SquareDiscriminant(i64),
    #[error("forms have different discriminants ({0} and {1})")]
    DiscriminantMismatch(i64, i64),
    #[error("relation matrix presents an infinite group")]
    InfiniteGroup,
    #[error("exponent vector has length {got}, expected {expected}")]
    VectorLength { got: usize, expected: usize },
    #[error("{0} is not a power of 3")]
    NotPowerOfThree(u64),
    #[error("local mass is undefined for totally ramified algebras")]
    TotallyRamified,
    #[error("primes in S must be distinct")]
    DuplicatePrime(u64),
    #[error("split pattern is not a subset of S")]
    SplitNotSubset,
    #[error("census accumulator is empty")]
    EmptyAccumulator,
    #[error("sieve up to {limit} needs {needed_mb} MB, above the {cap_mb} MB cap")]
    MemoryCap { limit: u64, needed_mb: u64, cap_mb: u64 },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
