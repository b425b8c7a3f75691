//! Crate-wide error type.

/// Errors shared by all modules.
///
/// Numeric payloads are carried as `f64` regardless of the scalar the
/// computation ran in; they are diagnostic only.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Argument outside the domain of a link, predictor, or design space.
    #[error("domain error in {what}: value {value}")]
    Domain { what: &'static str, value: f64 },

    /// A log-scale quantity became non-finite (overflow or underflow).
    #[error("overflow/underflow in {what} at {value}")]
    Overflow { what: &'static str, value: f64 },

    /// Invalid model or configuration parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Design violates its invariants (weights, bounds, duplicates).
    #[error("invalid design: {0}")]
    InvalidDesign(String),

    /// Invalid or malformed dataset; `line` is 1-based when known.
    #[error("invalid data{}: {msg}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    InvalidData { line: Option<u64>, msg: String },

    /// No sign change found in the scanned bracket.
    #[error("no root in bracket [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    /// Sign changes were found but every candidate root was rejected
    /// (residual too large or companion point outside the domain).
    /// Multiple intervals signal numerical root multiplicity.
    #[error("no valid root; {} sign-change interval(s) found and rejected", sign_changes.len())]
    NoValidRoot { sign_changes: Vec<(f64, f64)> },

    /// The W-function vanished inside the bracket without a usable root.
    #[error("W-function vanishes near {at} without a valid companion root")]
    SingularW { at: f64 },

    /// Solver asked to treat coincident support points.
    #[error("coincident points: {at}")]
    CoincidentPoints { at: f64 },

    /// Evaluation at a pole of the diagnostic function.
    #[error("pole of h at {at}")]
    Pole { at: f64 },

    /// Symmetric solver called with an asymmetric link.
    #[error("link {0} is not symmetric")]
    NotSymmetric(String),

    /// Predictor has no closed-form inverse for this request.
    #[error("predictor inversion: {0}")]
    Inversion(String),

    /// Information matrix (or one of its blocks) is numerically singular.
    #[error("singular {what}")]
    Singular { what: &'static str },

    /// Every candidate evaluated by the optimizer was infeasible.
    #[error("infeasible problem: {0}")]
    Infeasible(String),

    /// Fitted slope diverged; the data are (quasi-)separated.
    #[error("separation detected: standardized slope {beta1_std} exceeds guard")]
    Separation { beta1_std: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
