use std::fmt;

use thiserror::Error;

/// A single failed structural check on a model.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Dimension { what: &'static str, rows: usize, cols: usize, expected: usize },
    TooFewParticles(usize),
    NonPositive { field: &'static str, value: f64 },
    NonFinite { what: &'static str },
    AsymmetricW { row: usize, col: usize },
    NotShiftInvariant { row: usize, col: usize, deviation: f64 },
    RowSum { row: usize, sum: f64 },
    NegativeCoupling { row: usize, col: usize, value: f64 },
    AsymmetricK { row: usize, col: usize, deviation: f64 },
    IndefinitePotential { min_eigenvalue: f64, max_eigenvalue: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension { what, rows, cols, expected } => {
                write!(f, "{what} is {rows}x{cols}, expected {expected}x{expected}")
            }
            Violation::TooFewParticles(n) => write!(f, "need at least 2 particles per chain, got {n}"),
            Violation::NonPositive { field, value } => write!(f, "{field} must be positive, got {value}"),
            Violation::NonFinite { what } => write!(f, "{what} contains non-finite entries"),
            Violation::AsymmetricW { row, col } => write!(f, "W[{row}][{col}] != W[{col}][{row}]"),
            Violation::NotShiftInvariant { row, col, deviation } => {
                write!(f, "W is not shift invariant at ({row},{col}), deviation {deviation:e}")
            }
            Violation::RowSum { row, sum } => write!(f, "row {row} of W sums to {sum:e}"),
            Violation::NegativeCoupling { row, col, value } => {
                write!(f, "K[{row}][{col}] = {value} is negative")
            }
            Violation::AsymmetricK { row, col, deviation } => {
                write!(f, "K is not symmetric at ({row},{col}), deviation {deviation:e}")
            }
            Violation::IndefinitePotential { min_eigenvalue, max_eigenvalue } => write!(
                f,
                "potential is not positive semidefinite: min eigenvalue {min_eigenvalue:e}, max {max_eigenvalue:e}"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {}", join(.0))]
    InvalidModel(Vec<Violation>),
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unstable bath: bath matrix eigenvalue {eigenvalue:e} is not positive")]
    UnstableBath { eigenvalue: f64 },
    #[error("unstable collective sector: squared frequency {omega_sq:e} is not positive")]
    UnstableCollective { omega_sq: f64 },
    #[error("secular root not found in ({lower:e}, {upper:e})")]
    RootNotFound { lower: f64, upper: f64 },
    #[error("time step {step:e} too large, need at most {max_step:e}")]
    StepTooLarge { step: f64, max_step: f64 },
    #[error("regime is {0}, closed form needs an underdamped oscillator")]
    NotUnderdamped(&'static str),
    #[error("frequency grid too narrow: {0}")]
    GridTooNarrow(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument { name, reason: format!("must be positive and finite, got {value}") })
    }
}
