use thiserror::Error;

use crate::skewt::FitResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("moment of order {order} is undefined for nu = {nu}")]
    UndefinedMoment { order: u32, nu: f64 },

    /// The optimizer stopped without converging; the best point found is attached.
    #[error("fit did not converge after {} iterations", .0.iterations)]
    FitFailed(Box<FitResult>),

    /// An order-statistic index fell outside 1..=len of the predictive pool.
    #[error("credible interval needs order statistic {index} of a pool of {len}")]
    DegenerateIndex { index: i64, len: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{failed} of {total} replications failed, above the failure budget")]
    FailureBudget { failed: usize, total: usize },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
