use thiserror::Error;

/// Errors raised by the library. Every fallible public operation returns [`Result`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime in [2, 2^31)")]
    NotPrime(u64),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("trivial algebra: at least one variable is required")]
    TrivialAlgebra,
    #[error("degree {degree} is outside the algebra's degree bound {bound}")]
    DegreeOutOfBound { degree: i64, bound: usize },
    #[error("degree bound {bound} is too small, need at least {needed}")]
    BoundTooSmall { needed: usize, bound: usize },
    #[error("inhomogeneous element: {0}")]
    Inhomogeneous(String),
    #[error("multiplication table is not associative: {0}")]
    NotAssociative(String),
    #[error("invalid dimension vector: {0}")]
    InvalidDimensionVector(String),
    #[error("window of length 0: the operation needs q > p")]
    WindowTooShort,
    #[error("singular gauge block in degree {0}")]
    SingularGauge(i64),
    #[error("expected a cochain of degree {expected}, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("tangent complex requires a Maurer-Cartan point")]
    NotMaurerCartan,
    #[error("not a module: {0}")]
    NotAModule(String),
    #[error("character weights do not pair to zero with the dimension vector (pairing = {0})")]
    UnbalancedCharacter(i64),
    #[error("dimension vector not primitive (gcd = {0})")]
    NotPrimitive(u64),
    #[error("enumeration budget exceeded: {what} (budget {budget}, count bound {count_bound})")]
    BudgetExceeded {
        what: String,
        budget: u128,
        count_bound: u128,
    },
    #[error("module is not generated in its lowest degree")]
    NotGenerated,
    #[error("presentation mismatch: {0}")]
    PresentationMismatch(String),
    #[error("zero polynomial has no primitivity")]
    ZeroPolynomial,
    #[error("cannot reduce modulo {0}: a denominator is divisible by it")]
    NotReducible(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
