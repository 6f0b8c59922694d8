use thiserror::Error;

/// Errors raised by the solvers and model layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("kernel evaluated to a non-finite value at node pair (k={k}, l={l})")]
    KernelEvaluation { k: usize, l: usize },

    #[error("expected {expected} initial values, got {got}")]
    InitialsLength { expected: usize, got: usize },

    #[error("transfer amplitude |T| = {magnitude} exceeds 1 beyond the physicality guard")]
    Physicality { magnitude: f64 },

    #[error("amplitude vanishes at node {node}; decay rate has a pole")]
    Pole { node: usize },

    #[error("time {time} is not on the node grid")]
    OffGrid { time: f64 },

    #[error("diagram enumeration refused for N = {n} (limit {max})")]
    TooManyNodes { n: usize, max: usize },

    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },

    #[error(
        "characteristic roots nearly repeated (separation {separation}); perturb the parameters"
    )]
    DegenerateRoots { separation: f64 },

    #[error("{0} diverges")]
    Divergent(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
