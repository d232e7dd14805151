use thiserror::Error;

/// Errors raised by subspace and product-set operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no input matrices")]
    EmptyInput,
    #[error("matrices of mixed sizes: expected {expected}x{expected}, found {found}x{found}")]
    MixedSizes { expected: usize, found: usize },
    #[error("matrix {index} has a nonzero imaginary part but the field is real")]
    RealFieldViolation { index: usize },
    #[error("non-finite entry in {what}")]
    NonFinite { what: &'static str },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("field mismatch between subspaces")]
    FieldMismatch,
    #[error("transform matrix is singular (smallest/largest singular value {ratio:e})")]
    SingularTransform { ratio: f64 },
    #[error("zero subspace")]
    ZeroSubspace,
    #[error("{what} is not a member of its subspace (residual {residual:e})")]
    NotMember { what: &'static str, residual: f64 },
    #[error("expected a subspace of dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("no invertible element found in {what} after {tries} samples")]
    NoInvertibleElementFound { what: &'static str, tries: usize },
    #[error("{what} is not real symmetric")]
    NotSymmetric { what: &'static str },
    #[error("chain scalar t must be nonzero")]
    ZeroT,
    #[error("chain condition violated: X{j}·X{l} has relative norm {ratio:e}")]
    ChainConditionViolated { j: usize, l: usize, ratio: f64 },
    #[error("no nonzero Y in the second subspace maps A into the first")]
    NoFactorization,
    #[error("every sampled witness is singular (best reciprocal condition {rcond:e})")]
    SingularWitness { rcond: f64 },
    #[error("inverse of the witness leaves the second subspace (residual {residual:e}); is it inverse-closed?")]
    NotInverseClosed { residual: f64 },
    #[error("degree bound requires D >= 2, got {0}")]
    UnsupportedDegree(u32),
    #[error("degree bound overflows u128")]
    Overflow,
    #[error("{what} did not converge")]
    NoConvergence { what: &'static str },
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
