use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into three groups: invalid input (the caller asked for
/// something that does not exist), scale refusals ([`Error::TooLarge`]), and
/// internal consistency failures that can only be produced by a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is even; only odd characteristic is supported")]
    EvenCharacteristic(u64),
    #[error("extension degree must be at least 1, got {0}")]
    DegenerateDegree(i64),
    #[error("field of order {p}^{k} is too large")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("{delta} is not a unit modulo {p}")]
    NotAUnit { delta: i64, p: u64 },
    #[error("{numerator} is not divisible by {divisor} ({context})")]
    DivisibilityViolation {
        numerator: String,
        divisor: String,
        context: &'static str,
    },
    #[error("{what}: {size} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },
    #[error("epsilon {epsilon:?} is inconsistent with n = {n}")]
    EpsilonMismatch { n: usize, epsilon: Option<i8> },
    #[error("hermitian class ({hermitian}) disagrees with quadric class ({quadric})")]
    ClassificationMismatch {
        hermitian: &'static str,
        quadric: &'static str,
    },
    #[error("ambient invariant violated: {0}")]
    InvariantViolation(String),
    #[error("E2 page mismatch: {0}")]
    PageMismatch(String),
    #[error("invalid quadratic form: {0}")]
    InvalidForm(String),
    #[error("invalid hermitian datum: {0}")]
    InvalidDatum(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    /// True for errors that can only arise from an implementation defect.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::DivisibilityViolation { .. }
                | Error::ClassificationMismatch { .. }
                | Error::InvariantViolation(_)
                | Error::PageMismatch(_)
        )
    }

    pub fn is_scale_refusal(&self) -> bool {
        matches!(self, Error::TooLarge { .. } | Error::FieldTooLarge { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
