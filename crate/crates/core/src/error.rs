use thiserror::Error;

/// Which kind of pivot equation produced a decomposition failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotKind {
    Cholesky,
    Cubic,
    Quadratic,
    Linear,
}

impl std::fmt::Display for PivotKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PivotKind::Cholesky => "cholesky",
            PivotKind::Cubic => "cubic",
            PivotKind::Quadratic => "quadratic",
            PivotKind::Linear => "linear",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("entry at offset {offset} is not finite")]
    NonFiniteEntry { offset: usize },
    #[error("order must be at least 2 and dimension at least 1 (got order {order}, dim {dim})")]
    InvalidShape { order: usize, dim: usize },
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("expected a tensor of order {expected}, got order {got}")]
    OrderMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("count exceeds the 63-bit integer range")]
    Overflow,
    #[error("{0}^{1} index tuples exceed the enumeration guard")]
    TooLarge(usize, usize),
    #[error("tensor is not sub-Hermitian")]
    NotSubHermitian,
    #[error("tensor is not Hermitian")]
    NotHermitian,
    #[error("tensor is not lower triangular sub-Hermitian")]
    NotTriFactor,
    #[error("tensor is not lower triangular")]
    NotLowerTriangular,
    #[error("vector {vector} has negative component {component}")]
    NegativeComponent { vector: usize, component: usize },
    #[error("parameter {index} must be positive")]
    NonPositiveParameter { index: usize },
    #[error("factorization must contain at least one vector of a common dimension")]
    EmptyFactorization,
    #[error("all coefficients are zero")]
    AllZeroCoefficients,
    #[error("leading coefficient is zero")]
    DegenerateLeadingCoefficient,
    #[error("degenerate equation has no solution (residual {residual:e})")]
    InconsistentDegenerate { residual: f64 },
    #[error("no root met the residual bound")]
    NoRootFound,
    #[error("matrix is not positive semi-definite (pivot {pivot})")]
    NotPsd { pivot: usize },
    #[error("root iteration did not converge")]
    NonConvergence,
    #[error("step {k} equation is degenerate and unsatisfiable on every branch")]
    DegeneratePolynomial { k: usize },
    #[error("eigenvector is zero")]
    ZeroVector,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("{kind} pivot at k={k}, j={j}, i={i} failed: {source}")]
    PivotFailure {
        k: usize,
        j: usize,
        i: usize,
        kind: PivotKind,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed tensor file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
