use thiserror::Error;

/// Errors raised by the library. Every variant names the offending input so
/// that the CLI can report it verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,

    #[error("constant polynomial is not allowed here")]
    ConstantPolynomial,

    #[error("operands live over different fields (p = {left} vs p = {right})")]
    FieldMismatch { left: u64, right: u64 },

    #[error("curves use different exponents (l = {left} vs l = {right})")]
    ExponentMismatch { left: u64, right: u64 },

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("condition (*) fails: x = {x} has {roots} admissible y values in the y-interval")]
    ConditionStar { x: u64, roots: u32 },

    #[error("polynomials are multiplicatively dependent (witness exponents {witness:?})")]
    Dependent { witness: Vec<i64> },

    #[error("hypothesis `{name}` violated: {detail}")]
    Hypothesis { name: String, detail: String },

    #[error("enumeration too large: {size} exceeds the limit {limit}")]
    Infeasible { size: u128, limit: u128 },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn hypothesis(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            name: name.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
