use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: dimension mismatch {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op}: expected a non-empty square matrix, got {shape:?}")]
    NotSquare {
        op: &'static str,
        shape: (usize, usize),
    },

    #[error("matrix is not Hermitian: max |M_kl - conj(M_lk)| = {defect:e} exceeds {tolerance:e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("matrix is not diagonalizable: eigenvector condition number {condition:e}")]
    NotDiagonalizable { condition: f64 },

    #[error("matrix is singular to working precision")]
    SingularMatrix,

    #[error("function is undefined at eigenvalue {at}")]
    SingularEvaluation { at: f64 },

    #[error("{op} did not converge after {iterations} iterations")]
    NoConvergence { op: &'static str, iterations: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("potential `{potential}` is undefined at x = {x}")]
    PotentialDomain { potential: String, x: f64 },

    #[error("coordinate spectrum is degenerate: minimum gap {gap:e} <= {tolerance:e}")]
    DegenerateSpectrum { gap: f64, tolerance: f64 },

    #[error("precondition failed: {what} (measured {measured:e}, tolerance {tolerance:e})")]
    Precondition {
        what: &'static str,
        measured: f64,
        tolerance: f64,
    },

    #[error("need at least {needed} entries, got {got}")]
    LengthShortfall { needed: usize, got: usize },
}
