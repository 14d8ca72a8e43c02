use thiserror::Error;

/// Errors produced by mesh construction, integration and the two solver engines.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the problem geometry or configuration was violated.
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    /// Two profiles share no common abscissa range.
    #[error("profiles have no overlapping domain")]
    EmptyOverlap,

    /// The bracket endpoints do not straddle the target boundary value for
    /// the configured orientation, so bisection cannot make progress.
    #[error(
        "bracket [{lower}, {upper}] invalid for this orientation: \
         terminal residuals {lower_terminal:e} and {upper_terminal:e}"
    )]
    InvalidBracket {
        lower: f64,
        upper: f64,
        lower_terminal: f64,
        upper_terminal: f64,
    },

    /// Error control demanded a step below the configured minimum.
    #[error("step size underflow at r = {position:e}")]
    StepUnderflow { position: f64 },

    /// The integrator ran out of its step budget before reaching the end.
    #[error("integration step budget exhausted at r = {position:e}")]
    StepBudgetExhausted { position: f64 },

    /// Integration failed while evaluating one shooting parameter.
    #[error("shot at p = {p} failed: {source}")]
    ShotFailed {
        p: f64,
        #[source]
        source: Box<Error>,
    },

    /// Banded elimination hit an exactly zero pivot.
    #[error("singular matrix: zero pivot at index {pivot_index}")]
    SingularMatrix { pivot_index: usize },

    /// Newton iterates left the realm of finite floating point numbers.
    #[error("iteration diverged to non-finite values at iteration {iteration}")]
    Diverged { iteration: usize },

    /// A linear solve produced non-finite output from finite input.
    #[error("non-finite result in {context}")]
    NonFinite { context: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
