use lrecover_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// The scenario is malformed.
    Validation,
    /// The scenario is well formed but a solver precondition fails.
    Precondition,
    /// A result violates a property the construction guarantees.
    Invariant,
}

impl FailureKind {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureKind::Validation => 2,
            FailureKind::Precondition => 3,
            FailureKind::Invariant => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Validation, message: message.into() }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Precondition, message: message.into() }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Failure { kind: FailureKind::Invariant, message: message.into() }
    }

    /// Classifies a solver error raised while running `context`.
    pub fn from_solver(context: &str, e: Error) -> Self {
        let kind = match &e {
            Error::InvariantBreach(_) => FailureKind::Invariant,
            Error::ZeroMeasure
            | Error::ZeroFunctional(_)
            | Error::EmptyBall { .. }
            | Error::EpsCondition { .. }
            | Error::EpsTooLarge { .. }
            | Error::NoUnitElement(_)
            | Error::NotABox
            | Error::NoNodeAtRadius(_)
            | Error::NotInvertible
            | Error::LowerBoundUnavailable
            | Error::CollisionExceeded { .. }
            | Error::NegativeArgument(_) => FailureKind::Precondition,
            _ => FailureKind::Validation,
        };
        Failure { kind, message: format!("{context}: {e}") }
    }
}
