use thiserror::Error;

/// Crate-wide error type.
///
/// Each variant carries an exit-code class used by the CLI:
/// 1 = malformed input, 2 = computation failed, 3 = certificate violation.
#[derive(Error, Debug)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("permutation representation is not transitive; orbits: {orbits:?}")]
    NonTransitive { orbits: Vec<Vec<usize>>, },

    #[error("automorphism has no certified inverse")]
    NoCertifiedInverse,

    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("relator {relator} is not satisfied by the permutation representation")]
    RelatorNotSatisfied { relator: String },

    #[error("no lifting power m <= {bound} found")]
    PowerBoundExceeded { bound: u32 },

    #[error("orbifold filling failed: unwrapping degree {degree} does not divide {n}")]
    FillFailed { degree: usize, n: u32 },

    #[error("quotient search exhausted (primes tried: {primes_tried:?})")]
    QuotientSearchFailed { primes_tried: Vec<u64> },

    #[error("certificate violation: {0}")]
    CertificateViolation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit-code class for the CLI front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::InvalidInput(_)
            | Error::RankMismatch { .. }
            | Error::DegreeMismatch { .. }
            | Error::NonSquare { .. } => 1,
            Error::CertificateViolation(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
