use thiserror::Error;

/// Errors raised by the allocation pipeline.
///
/// Per-FAP infeasibility is not an error; it is reported in the data
/// (see [`crate::load::LoadEstimate::feasible`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    #[error("invalid configuration `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("topology contains no FAPs; nothing to allocate")]
    NoFaps,

    #[error("exact coloring oracle refuses graphs above {cap} nodes (got {nodes})")]
    OracleTooLarge { nodes: usize, cap: usize },

    #[error("linear program did not converge within {0} pivots")]
    LpIterationLimit(usize),

    #[error("linear program is unbounded")]
    LpUnbounded,
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
