use thiserror::Error;

use crate::field::ArithError;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("sub-basis is not saturated: {0}")]
    NotSaturated(String),
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("unsupported ambient rank {0} (supported: 1, 2, 3)")]
    UnsupportedRank(usize),
    #[error("polytope has dimension {dim} < ambient rank {rank}")]
    LowerDimensionalPolytope { dim: usize, rank: usize },
    #[error("polytope is not integral: vertex {0} is not a lattice point")]
    NonIntegralPolytope(String),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("system has {0} effective variables, at most 2 are supported")]
    DimensionTooHigh(usize),
    #[error("combinatorial conditions not met: {0}")]
    ConditionsNotMet(String),
    #[error("strength-2 conditions not met: {0}")]
    StrengthConditionsNotMet(String),
    #[error("base divisor lies in the bad locus: {0}")]
    BaseInBadLocus(String),
    #[error("base divisor lies in Y': {0}")]
    BaseInYprime(String),
    #[error("not a pencil: {0}")]
    NotAPencil(String),
    #[error("non-rational input: {0}")]
    NonRationalInput(String),
    #[error("solver failure: {0}")]
    SolverFailure(String),
}

impl From<ArithError> for Error {
    fn from(e: ArithError) -> Self {
        Error::SolverFailure(format!("unhandled arithmetic event: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
