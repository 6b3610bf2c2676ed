use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the algebra, recursion and transform layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("constant coefficient is singular")]
    SingularConstant,
    #[error("matrix is singular")]
    Singular,
    #[error("subspace is not contained in the enclosing subspace")]
    Containment,
    #[error("subspaces do not form a direct sum of the ambient space")]
    NotDirectSum,
    #[error("basis columns are linearly dependent")]
    DependentBasis,
    #[error("coefficient {needed} requested but the jet only stores up to {available}")]
    MissingCoefficient { needed: usize, available: usize },
    #[error("a truncated jet cannot be recentred at a nonzero point")]
    JetShift,
    #[error("operation needs a polynomial-exact series")]
    NotPolynomial,
    #[error("no stabilization within k_max = {k_max}; R dimensions so far {partial_r_dims:?}")]
    KMaxExceeded { k_max: usize, partial_r_dims: Vec<usize> },
    #[error("stabilization has not been declared")]
    NotStabilized,
    #[error("need {needed} recursion steps, have {have}")]
    InsufficientSteps { needed: usize, have: usize },
    #[error("curve is not an approximation of order {needed} (residual order {got})")]
    ResidualOrder { needed: usize, got: usize },
    #[error("requested order {requested} exceeds validity {valid}")]
    OutsideValidity { requested: usize, valid: usize },
    #[error("internal consistency: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
