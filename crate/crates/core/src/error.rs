use crate::rates::BoundaryClass;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid rates: {0}")]
    InvalidRates(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The computation requires a boundary class the chain does not have.
    #[error("refused: {reason} (boundary class {class:?})")]
    Refused {
        reason: String,
        class: BoundaryClass,
    },

    /// A series or limit could not be decided at the configured horizon.
    #[error("undetermined: {0}")]
    Undetermined(String),

    /// Sturm bisection failed to bracket an eigenvalue.
    #[error("bisection failed for eigenvalue {index}: interval [{lo:e}, {hi:e}], counts ({count_lo}, {count_hi})")]
    Bisection {
        index: usize,
        lo: f64,
        hi: f64,
        count_lo: usize,
        count_hi: usize,
    },

    /// A truncated eigenvalue increased along the truncation schedule.
    #[error("eigenvalue {index} increased from {previous:e} to {current:e} between levels {from} and {to}")]
    NonMonotone {
        index: usize,
        previous: f64,
        current: f64,
        from: usize,
        to: usize,
    },

    /// Two eigenvalues closer than the simplicity threshold.
    #[error("eigenvalues {index} and {} collapsed: {lower:e} vs {upper:e}", index + 1)]
    GapCollapse {
        index: usize,
        lower: f64,
        upper: f64,
    },

    /// Two independent routes to the same quantity disagree.
    #[error("identity violation in {identity}: {lhs:e} vs {rhs:e} (relative {relative:e})")]
    IdentityViolation {
        identity: String,
        lhs: f64,
        rhs: f64,
        relative: f64,
    },

    /// A derived chain does not have the boundary class the theory predicts.
    #[error("expected boundary class {expected:?}, found {found:?}")]
    ClassMismatch {
        expected: BoundaryClass,
        found: BoundaryClass,
    },

    #[error("law is not finite: {0}")]
    InfiniteLaw(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
