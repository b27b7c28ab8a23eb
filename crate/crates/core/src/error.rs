//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{n} is not prime")]
    NotPrime { n: u64 },

    #[error("{n} is not an odd prime")]
    NotOddPrime { n: u64 },

    #[error("Jacobi symbol modulus {n} must be odd and positive")]
    BadJacobiModulus { n: String },

    #[error("prime {p} violates the required congruence {requirement}")]
    WrongResidueClass { p: u64, requirement: &'static str },

    #[error("{a} is not a quadratic residue mod {p}; the quartic symbol is undefined")]
    NotQuadraticResidue { a: i64, p: u64 },

    #[error("{p} is not of the form u^2 - 2v^2 (requires p = 1 or 7 mod 8)")]
    NotRepresentable { p: u64 },

    #[error("no representation u^2 - 2v^2 = {p} found below the search bound (implementation bug)")]
    SearchBoundExceeded { p: u64 },

    #[error("{d} is not squarefree")]
    NotSquarefree { d: u64 },

    #[error("{d} is a perfect square")]
    PerfectSquare { d: u64 },

    #[error("{elem} is not totally positive")]
    NotTotallyPositive { elem: String },

    #[error("x^2 - {d} y^2 = 2 has no solution, contradicting theory for this input")]
    NoNormTwoSolution { d: u64 },

    #[error("discriminant {d} must be negative and = 0 or 1 mod 4")]
    BadDiscriminant { d: i64 },

    #[error("invalid argument: {what}")]
    InvalidArgument { what: String },

    #[error("internal invariant violated: {what}")]
    InvariantViolation { what: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that indicate an implementation bug or environment
    /// failure rather than bad input (CLI exit code 3 vs 2).
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::SearchBoundExceeded { .. } | Error::InvariantViolation { .. } | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
