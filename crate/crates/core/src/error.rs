use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("algebra mismatch: {0} vs {1}")]
    AlgebraMismatch(String, String),
    #[error("jet with zero body is not invertible")]
    NotInvertible,
    #[error("branch violation: {0}")]
    Branch(String),
    #[error("value not representable in exact mode: {0}")]
    NotRepresentable(String),
    #[error("derivative supplier failed: {0}")]
    Derivative(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("tolerance {tol:e} not reached after {iters} iterations")]
    NoConvergence { tol: f64, iters: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("relation {index} does not evaluate to +/- identity")]
    BadRelation { index: usize },
    #[error("cocycle condition fails on relation {0}")]
    NotCocycle(usize),
    #[error("lifting obstructed at order {order}")]
    Obstruction { order: usize },
    #[error("evaluation outside valid region: {0}")]
    Region(String),
    #[error("undetermined: {0}")]
    Undetermined(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
