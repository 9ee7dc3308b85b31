use thiserror::Error;

/// Failures of the algebra layers (fields, polynomials, ideals, decomposition).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("polynomial syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unsupported shape for factorization: {0}")]
    UnsupportedShape(String),
    #[error("could not certify primality of {0}")]
    UndecidedPrimality(String),
    #[error("{prime} is not a minimal prime of {ideal}")]
    NotMinimal { prime: String, ideal: String },
    #[error("{prime} does not contain {ideal}")]
    NotContaining { prime: String, ideal: String },
    #[error("internal consistency failure: inexact division {0}")]
    NonExactDivision(String),
    #[error("saturation did not stabilize within {0} rounds")]
    SaturationDiverged(usize),
    #[error("{0} is not a prime ideal")]
    NotPrime(String),
}

/// Failures of the geometric layer (schemes, morphisms, cycles).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("morphism {morphism} is not well defined: generator {generator} of piece {piece} does not pull back into the source ideal")]
    IllDefined {
        morphism: String,
        piece: String,
        generator: String,
    },
    #[error("morphism {0} is not a closed immersion: {1}")]
    NotClosedImmersion(String, String),
    #[error("scheme mismatch: expected {expected}, found {found}")]
    SchemeMismatch { expected: String, found: String },
    #[error("unknown piece {0}")]
    UnknownPiece(String),
}

/// Failures of descent computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescentError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("morphism {0} is not asserted universally_generalizing")]
    NotUniversallyGeneralizing(String),
    #[error("empty fiber over {0}")]
    EmptyFiber(String),
    #[error("empty point scope")]
    EmptyScope,
    #[error("zero cycle has no effective order")]
    ZeroCycle,
    #[error("verification failure: {0}")]
    Violation(String),
}

impl From<AlgebraError> for DescentError {
    fn from(e: AlgebraError) -> Self {
        DescentError::Scheme(SchemeError::Algebra(e))
    }
}
