use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of a function or operator.
    Domain { what: &'static str, value: f64 },
    /// An operator needs more samples than were supplied.
    InsufficientHistory { needed: usize, got: usize },
    /// A series ran out of its term budget before converging.
    Convergence { terms: usize, partial_sum: f64 },
    /// Series terms cancel so strongly that the result would carry no accurate digits.
    Cancellation { peak_term: f64, partial_sum: f64 },
    /// A memory kernel violates an admissibility condition.
    Admissibility { condition: &'static str, value: f64 },
    /// A configuration value breaks an invariant.
    InvalidConfig { field: &'static str, reason: &'static str },
    /// Sampled data does not match the grid it is used with.
    ShapeMismatch { expected: usize, got: usize },
    /// The linear solve of a time step failed.
    NumericalFailure { step: usize },
    /// A ratio was requested with a zero denominator.
    UndefinedRatio,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what}: argument {value} out of domain"),
            Error::InsufficientHistory { needed, got } => {
                write!(f, "insufficient history: need {needed} samples, got {got}")
            }
            Error::Convergence { terms, partial_sum } => write!(
                f,
                "series did not converge within {terms} terms (partial sum {partial_sum:e})"
            ),
            Error::Cancellation {
                peak_term,
                partial_sum,
            } => write!(
                f,
                "catastrophic cancellation: peak term {peak_term:e} against sum {partial_sum:e}"
            ),
            Error::Admissibility { condition, value } => {
                write!(f, "kernel not admissible: {condition} (value {value:e})")
            }
            Error::InvalidConfig { field, reason } => write!(f, "invalid {field}: {reason}"),
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected} values, got {got}")
            }
            Error::NumericalFailure { step } => write!(f, "linear solve failed at step {step}"),
            Error::UndefinedRatio => write!(f, "ratio undefined for a zero perturbation"),
        }
    }
}

impl core::error::Error for Error {}
