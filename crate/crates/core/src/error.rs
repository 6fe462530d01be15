use thiserror::Error;

/// Everything that can go wrong inside the toolkit. The CLI maps each
/// variant onto an exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SosError {
    /// An argument lies outside the mathematical domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs are individually valid but inconsistent with each other
    /// (pattern vs. tree order, wrong vector length, m != 2 on an m = 2 path).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The requested quantity does not exist in this parameter regime.
    #[error("regime error: {0}")]
    Regime(String),

    /// A quantity is undefined because a parameter vanishes (h* = 0).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A root scan found nothing although a root is known to exist.
    #[error("scan window error: {0}")]
    ScanWindow(String),

    /// Exact enumeration was refused.
    #[error("ball of {vertices} vertices exceeds the enumeration budget of {limit}")]
    Size { vertices: usize, limit: usize },
}

impl SosError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        SosError::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        SosError::Contract(msg.into())
    }

    pub(crate) fn regime(msg: impl Into<String>) -> Self {
        SosError::Regime(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, SosError>;
