use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter is out of its admissible range.
    Parameter(String),
    /// A configuration violates the ordering constraints of its space.
    Validation(Vec<Violation>),
    /// Two particles coincide, so derivatives of the log-energy do not exist.
    Singularity { first: usize, second: usize },
    /// An evaluation point sits on a pole of the ODE coefficients.
    Domain(String),
    /// The tridiagonal eigensolver ran out of iterations.
    NonConvergence { index: usize, iterations: usize },
    /// Symmetric factorization failed: the matrix is not positive definite.
    NotPositiveDefinite { pivot: usize, value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Validation(violations) => {
                write!(f, "configuration violates {} constraint(s)", violations.len())?;
                for v in violations {
                    write!(f, "; {v}")?;
                }
                Ok(())
            }
            Error::Singularity { first, second } => {
                write!(f, "particles {first} and {second} coincide")
            }
            Error::Domain(msg) => write!(f, "point outside domain: {msg}"),
            Error::NonConvergence { index, iterations } => write!(
                f,
                "tridiagonal eigensolver did not converge for eigenvalue {index} after {iterations} iterations"
            ),
            Error::NotPositiveDefinite { pivot, value } => {
                write!(f, "matrix not positive definite: pivot {pivot} is {value:e}")
            }
        }
    }
}

impl core::error::Error for Error {}
