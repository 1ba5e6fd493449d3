use thiserror::Error;

/// Errors shared by every computation module.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported gamma argument {num}/{den}")]
    UnsupportedArgument { num: u32, den: u32 },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("imaginary part below 0.5: {0}")]
    DomainTooLow(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("polynomial is not squarefree")]
    NotSquarefree,

    #[error("reducible (or not certifiably irreducible): {0}")]
    Reducible(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("gap scan found multiple separated local maxima; inspect manually")]
    NotUnimodal,

    #[error("unknown lemma id `{0}`")]
    UnknownLemma(String),

    #[error("p = {p} is not congruent to (-1)^{n} mod 9")]
    BadCongruence { p: u64, n: u32 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("negative input: {0}")]
    NegativeInput(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("non-integer coefficient `{0}`")]
    NonIntegerCoefficient(String),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("constant polynomial")]
    ConstantPolynomial,

    #[error("invalid precision context: {0}")]
    InvalidContext(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
