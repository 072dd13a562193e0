use thiserror::Error;

/// Errors raised by the matrix kernel, the model builders and the transform pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op}: expected a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not hermitian: relative residual {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("model invariant violated: {what} (residual {residual:e})")]
    ModelInvariant { what: &'static str, residual: f64 },

    #[error("operators do not commute: relative commutator residual {residual:e}")]
    CommutatorTooLarge { residual: f64 },

    #[error(
        "isospectral construction inapplicable: N2 = x^dagger x admits no inverse \
         (smallest eigenvalue {min_eigenvalue:e})"
    )]
    SingularN2 { min_eigenvalue: f64 },

    #[error("label ({n}, {k}) has zero nu; cannot invert the map")]
    ZeroNu { n: usize, k: usize },

    #[error("level-two family is incomplete: dim ker(X Theta^-1) = {kernel_dim}")]
    KernelCondition { kernel_dim: usize },

    #[error("metric condition number {condition:e} exceeds the trust limit {limit:e}")]
    IllConditioned { condition: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
