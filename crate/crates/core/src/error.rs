use thiserror::Error;

use crate::instance::{ElementId, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown element id {0}")]
    UnknownId(ElementId),
    #[error("epsilon {num}/{den} is outside the admissible range")]
    InvalidEpsilon { num: u64, den: u64 },
    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),
    #[error("set is infeasible for the constraint")]
    Infeasible,
    #[error("set is not a solution: {0}")]
    NotASolution(String),
    #[error("operation requires a {expected} constraint")]
    WrongConstraint { expected: &'static str },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("exchange-set recursion exceeded its budget of {limit} branches")]
    BranchBudgetExceeded { limit: usize },
    #[error("skeleton enumeration exceeded the cap of {cap} subsets")]
    EnumerationCapExceeded { cap: u64 },
    #[error("{size} elements exceed the exhaustive-search guard of {guard}")]
    GuardExceeded { size: usize, guard: usize },
    #[error("postcondition violated: {0}")]
    Postcondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
