use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("requested {requested} modes but {propagating} modes propagate; the propagating block would be truncated")]
    TooFewModes { requested: usize, propagating: usize },

    #[error("mode {mode} is within the cutoff guard (|beta| = {beta:e}, k = {k:e})")]
    AtCutoff { mode: String, beta: f64, k: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("propagating block is not unitary: residual {residual:e} exceeds {tolerance:e}")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error("matrix is not Hermitian: relative residual {residual:e} exceeds {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("modes are not ordered propagating-first")]
    Ordering,

    #[error("missing data: {0}")]
    Missing(&'static str),

    #[error("Floquet mode {0} has no conjugate partner in the window")]
    Unpaired(String),

    #[error("singular interface system (I - S22 S22): {0}")]
    Singular(String),

    #[error("ill-conditioned mode-matching system: condition estimate {condition:e}; rebalance the wide/narrow mode counts")]
    IllConditioned { condition: f64 },

    #[error("point {point:?} lies outside the field region")]
    OutsideRegion { point: [f64; 3] },

    #[error("excitation {0} is a shared-port mode, not an external excitation")]
    NotExternal(usize),

    #[error("finite-difference oracle failed: {0}")]
    FiniteDifference(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn dim(context: &'static str, expected: impl ToString, got: impl ToString) -> Self {
        Error::Dimension {
            context,
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
