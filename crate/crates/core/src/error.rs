use thiserror::Error;

/// Errors raised by the analytics, sampling and Monte Carlo layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("expected point count {expected:.3e} exceeds cap {cap}")]
    Resource { expected: f64, cap: usize },

    #[error(
        "quadrature did not converge after {depth} refinements (last {last:.12e}, previous {previous:.12e})"
    )]
    NonConvergence {
        depth: usize,
        last: f64,
        previous: f64,
    },

    #[error(
        "Palm acceptance rate {rate:.3e} below {min_rate:.0e} ({accepted} accepted of {attempted}); parameters too dense for acceptance sampling"
    )]
    AcceptanceTooLow {
        rate: f64,
        min_rate: f64,
        accepted: u64,
        attempted: u64,
    },

    #[error("invalid configuration `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
