use thiserror::Error;

/// Errors raised by the library.
///
/// Budget exhaustion is kept separate from input validation so callers can
/// widen a budget and retry.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("zero is not allowed here")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("prime {0} exceeds the supported 64-bit range")]
    PrimeTooLarge(String),
    #[error("degree {got} outside the supported range {min}..={max}")]
    Degree { got: usize, min: usize, max: usize },
    #[error("discriminant is zero")]
    ZeroDiscriminant,
    #[error("polynomial vanishes identically modulo {0}")]
    VanishesModP(u64),
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(String),
    #[error("singular basis")]
    SingularBasis,
    #[error("pair ({0}, {1}) is not primitive")]
    NotPrimitive(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("invalid automorphism set: {0}")]
    Automorphism(String),
    #[error("factorization expands to a different form: {0}")]
    ExpansionMismatch(String),
    #[error("linear forms are not closed under the Galois action: {0}")]
    OrbitBreach(String),
    #[error("multiplicities are not constant on Galois orbits: {0}")]
    MultiplicityBreach(String),
    #[error("linear forms {0} and {1} are proportional")]
    ProportionalPair(usize, usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True when the error is a recoverable budget exhaustion.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
