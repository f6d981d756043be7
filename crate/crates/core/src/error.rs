//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::analysis::Regime;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("qubit count must be between 1 and {max}, got {got}")]
    QubitCountOutOfRange { got: u32, max: u32 },

    #[error("vector norm deviates from 1 by {deviation:.3e} (tolerance {tolerance:.1e})")]
    NotNormalized { deviation: f64, tolerance: f64 },

    #[error("non-finite component at index {0}")]
    NonFinite(usize),

    #[error("{0} angle is not finite")]
    NonFiniteAngle(&'static str),

    #[error("marked set is empty")]
    EmptyMarkedSet,

    #[error("marked index {index} out of range for dimension {dim}")]
    MarkedIndexOutOfRange { index: usize, dim: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error(
        "matrix is not unitary: largest |U\u{2020}U - I| entry is {max_deviation:.3e} \
         (tolerance {tolerance:.1e})"
    )]
    NotUnitary { max_deviation: f64, tolerance: f64 },

    #[error("basis index {index} out of range for dimension {dim}")]
    BasisIndexOutOfRange { index: usize, dim: usize },

    #[error("{context}: length {got} does not match dimension {expected}")]
    DimensionMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("iteration count {got} exceeds the guard of {guard}")]
    IterationGuard { got: u64, guard: u64 },

    #[error(
        "degenerate spectrum (eigenvalue gap {gap:.3e}): the closed form is unavailable, \
         evolve the means with the matrix-power path instead"
    )]
    DegenerateSpectrum { gap: f64 },

    #[error(
        "{0} weighted mean is undefined: every state in the class has a vanishing \
         diffusion-vector entry"
    )]
    UndefinedMean(&'static str),

    #[error("operation requires the equal-angles regime, got {0}")]
    RegimeMismatch(Regime),

    #[error("{0} weight is zero")]
    ZeroWeight(&'static str),

    #[error(
        "oscillation profile inconsistent: reconstructed P(0) differs from the initial \
         marked probability by {0:.3e}"
    )]
    ProfileInconsistent(f64),
}
