use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator index {index} out of range for rank {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("rank must be positive")]
    ZeroRank,
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("parabolic index m = {m} out of range 1..={n}")]
    ParabolicOutOfRange { m: usize, n: usize },
    #[error("negative radicand {value} at index {index}")]
    Domain { index: i64, value: f64 },
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("torus entry {index} has modulus {modulus}, expected 1")]
    NonUnitTorus { index: usize, modulus: f64 },
    #[error("words represent different elements")]
    DifferentElements,
    #[error("element is not in the quotient W^R")]
    NotInQuotient,
    #[error("last part of w is empty")]
    EmptyPart,
    #[error("node {node} out of range 1..={max}")]
    NodeOutOfRange { node: usize, max: usize },
    #[error("embedding maps are not consecutive")]
    NonConsecutive,
    #[error("witness verification failed: {0}")]
    Witness(String),
    #[error("basis size exceeded cap {cap}")]
    Budget { cap: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
