use thiserror::Error;

/// Errors raised by the exact linear algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not skew-symmetric at entry ({i},{j})")]
    NotSkew { i: usize, j: usize },

    #[error("pfaffian requires even dimension, got {dim}")]
    OddDimension { dim: usize },

    #[error("sampler exhausted after {attempts} rejected draws")]
    SamplerExhausted { attempts: usize },

    #[error("incompatible variable sets")]
    VarSetMismatch,

    #[error("division by zero polynomial")]
    DivisionByZero,
}
