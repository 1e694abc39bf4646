use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input series is empty")]
    EmptyInput,
    #[error("non-finite value {value} at position {position}")]
    NonFinite { position: usize, value: f64 },
    #[error("series of length {0} exceeds the supported maximum")]
    SeriesTooLong(usize),
    #[error("invalid fragment [{i}, {j}] for a series of length {n}")]
    InvalidRange { i: usize, j: usize, n: usize },
    #[error("code component {component} outside [-1, {max}]")]
    CodeOutOfRange { component: i64, max: i64 },
    #[error("letter {letter} outside alphabet of size {sigma}")]
    LetterOutOfRange { letter: u32, sigma: u32 },
    #[error("node {0} does not belong to this tree")]
    ForeignNode(u32),
    #[error("empty node set")]
    EmptyNodeSet,
    #[error("frequency threshold must exceed 1, got {0}")]
    InvalidTau(usize),
    #[error("series of length {n} exceeds the brute-force cap of {cap}")]
    OverCap { n: usize, cap: usize },
    #[error("malformed pattern code: {0}")]
    MalformedCode(String),
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("malformed index file: {0}")]
    MalformedIndex(String),
    #[error("unsupported index format version {0}")]
    UnsupportedVersion(u32),
    #[error("structure check failed ({property}): {detail}")]
    StructureViolation { property: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
