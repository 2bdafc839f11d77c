use thiserror::Error;

/// Errors raised by the distribution, analytic and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("moment of order {order} is infinite for {dist}")]
    InfiniteMoment { order: u32, dist: String },

    #[error("argument {s} is outside the domain where the MGF of {dist} is finite")]
    MgfDomain { s: f64, dist: String },

    #[error("{0} has no finite (tau^2, b) sub-exponential parameters")]
    NotSubExponential(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inconsistent model: {0}")]
    ModelInconsistency(String),

    #[error("probability of queue length {0} is zero")]
    ZeroMass(usize),

    #[error("rank {rank} out of range 1..={count}")]
    RankOutOfRange { rank: usize, count: usize },

    #[error("unstable configuration: lambda = {0} must be < 1")]
    Unstable(f64),

    #[error("policy needs {needed} servers but the cluster has {available}")]
    PolicyMismatch { needed: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
