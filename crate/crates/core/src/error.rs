use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid modulus {0}: must be in 1..=2^63-1")]
    InvalidModulus(u64),

    #[error("exponent {0} outside (0, 1]")]
    InvalidExponent(String),

    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("residue count {got} does not match {expected} prime-power factors")]
    ResidueCount { expected: usize, got: usize },

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("integer matrix has determinant {0}, expected 1")]
    Determinant(i128),

    #[error("determinant is {det} mod {modulus}, expected 1")]
    ResidueDeterminant { det: u64, modulus: u64 },

    #[error("{target} does not divide {modulus}")]
    NotDivisor { target: u64, modulus: u64 },

    #[error("component index {0} out of range 1..=3")]
    ComponentIndex(usize),

    #[error("enumeration cap exceeded: {what} needs {needed} elements, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("generating set is empty")]
    EmptyGeneratingSet,

    #[error("generating set is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("invalid vertex subset: {0}")]
    InvalidSubset(String),

    #[error("graph has {0} vertices; exact Cheeger search is limited to 24, use spectral bounds")]
    TooLargeForExactCheeger(usize),

    #[error("graph has {0} vertices; dense eigensolve is limited to 5000")]
    TooLargeForDense(usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigenpair residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("measures live on different group indices")]
    IndexMismatch,

    #[error("convolution power must be at least 1")]
    ZeroPower,

    #[error("linear form is not primitive (gcd {0})")]
    NotPrimitive(i64),

    #[error("trace form precondition failed: {0}")]
    TraceForm(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
