use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NonPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("modulus {modulus:?} is reducible over F_{p}")]
    ReducibleModulus { p: u32, modulus: Vec<u32> },
    #[error("modulus must be monic of degree {expected} over F_{p}, got {modulus:?}")]
    BadModulus {
        p: u32,
        expected: u32,
        modulus: Vec<u32>,
    },
    #[error("no built-in modulus for F_{{{p}^{k}}}; supply one explicitly")]
    UnsupportedField { p: u32, k: u32 },
    #[error("field too large: {0}")]
    FieldTooLarge(String),
    #[error("coefficient {value} out of range for F_{p}")]
    BadCoefficient { p: u32, value: u32 },
    #[error("operands live in different fields")]
    CtxMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("{what} has {size} elements, over the cap of {cap}")]
    SizeTooLarge { what: String, size: u128, cap: u64 },
    #[error("rank {rank} out of range for n = {n}")]
    BadRank { rank: usize, n: usize },
    #[error("closed forms are only available for n = {expected}, got n = {got}")]
    UnsupportedDimension { expected: usize, got: usize },
    #[error("q = {0} is too small (need q >= 2)")]
    BadOrder(u64),
    #[error("cyclotomic orders differ: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("cyclotomic value {0:?} is not a rational integer")]
    NotRational(Vec<i64>),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("inexact division {num} / {den}")]
    InexactDivision { num: i128, den: i128 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("character vector is not an eigenvector: mismatch at coordinate {coordinate}")]
    EigenvectorMismatch { coordinate: u64 },
    #[error("rank class {rank} carries more than one eigenvalue ({first} and {second})")]
    RankVariance {
        rank: usize,
        first: i128,
        second: i128,
    },
    #[error(
        "spectral gap theorem violated: sizes {x} x {y} exceed the bound but no witness exists"
    )]
    TheoremViolation { x: usize, y: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
