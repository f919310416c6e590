use thiserror::Error;

/// Errors raised by the Kleisli machinery and the checkers built on it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),

    #[error("invalid finite set: {0}")]
    InvalidSet(String),

    #[error("element `{element}` is not in set `{set}`")]
    ElementNotInSet { set: String, element: String },

    #[error("empty codomain with non-empty domain")]
    EmptyCodomain,

    #[error("invalid payload for monad {monad}: {reason}")]
    PayloadInvalid { monad: String, reason: String },

    #[error("{0} has no enumerator")]
    NotEnumerable(String),

    #[error("monad {0} has neither an enumerator nor a scalar solver")]
    UndecidableWithoutSolver(String),

    #[error("multiplicity {value} exceeds the bound {bound}")]
    OutOfBound { value: String, bound: i64 },

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("not normalizable: mass is not invertible at `{witness}`")]
    NotNormalizable { witness: String },

    #[error("invalid block: {0}")]
    InvalidBlock(String),

    #[error("method not applicable: {0}")]
    MethodInapplicable(String),

    #[error("randomized pullback check needs a cone solver: {0}")]
    NoSolverForRandomized(String),

    #[error("exhaustive enumeration of {what} needs {needed} cases, budget is {budget}")]
    BudgetExceeded { what: String, needed: u128, budget: u128 },

    #[error("unknown monad `{0}`")]
    UnknownMonad(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
