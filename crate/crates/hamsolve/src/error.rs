//! Error types shared by the calculus, problem and homotopy layers.

use crate::algebra::ExpConstant;

/// Errors raised by the exact operator pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    /// A required constant of the form `sum q_i * e^(c_i)` did not collapse to
    /// a rational, so the result cannot be represented as an exp-polynomial.
    /// The offending constant is carried symbolically, never as a float.
    #[error("definite integral produced a non-rational constant: {constant}")]
    NonClosedConstant { constant: ExpConstant },

    /// An operation received the wrong number of initial values.
    #[error("expected {expected} initial values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}
