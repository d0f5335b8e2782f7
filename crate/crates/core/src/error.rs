use thiserror::Error;

/// Failure modes shared across the engine. Mathematical verdicts (a check
/// that honestly fails) are not errors; these are conditions under which a
/// requested computation cannot be carried out at all.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("laurent inverse requires a monomial, got {0}")]
    NonMonomialInverse(String),

    #[error("value not representable in the requested backend")]
    NotRepresentable,

    #[error("mixed scalar backends in one container: {0} vs {1}")]
    MixedBackends(crate::arith::Backend, crate::arith::Backend),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not diagonalizable at tolerance")]
    NotDiagonalizable,

    #[error("eigenvalue iteration failed to converge")]
    EigenNoConvergence,

    #[error("operator is not self-adjoint for the given inner product")]
    NotSelfAdjoint,

    #[error("operator spectrum is not positive: eigenvalue {0}")]
    NotPositive(String),

    #[error("gram matrix is not hermitian")]
    GramNotHermitian,

    #[error("gram matrix is not positive definite")]
    GramNotPositive,

    #[error("exact backend cannot express this result ({0}); convert the input to the float backend")]
    ExactUnrepresentable(String),

    #[error("not cosemisimple at tolerance: {0}")]
    NotCosemisimple(String),

    #[error("coalgebra axiom violated: {0}")]
    CoalgebraAxiom(String),

    #[error("hopf axiom violated: {0}")]
    HopfAxiom(String),

    #[error("circ structure invalid: {0}")]
    CircAxiom(String),

    #[error("no normal integral: {0}")]
    NoIntegral(String),

    #[error("comodule axiom violated: {0}")]
    ComoduleAxiom(String),

    #[error("fourier structure invalid: {0}")]
    FourierAxiom(String),

    #[error("component is not simple: {0}")]
    NotSimple(String),

    #[error("automorphism is not inner on this component: {0}")]
    NotInner(String),

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("input rejected: {0}")]
    BadInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
