use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("incompatible shapes: {op} of {lhs:?} and {rhs:?}")]
    ShapeMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry count {got} does not match {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not hermitian: max |A - A^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix is not unitary: ||U^dagger U - I||_F = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("trace is {trace}, expected 1")]
    Trace { trace: f64 },
    #[error("not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("{name} = {value} outside admissible interval [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("amplitudes not normalized: sum of squares is {norm_sq}, defect {defect:e}")]
    Unnormalized { norm_sq: f64, defect: f64 },
    #[error("local dimension must be at least {min}, got {d}")]
    Dimension { d: usize, min: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
