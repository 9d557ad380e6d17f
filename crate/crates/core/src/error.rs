use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid pi: {0}")]
    InvalidPi(String),

    #[error("polynomial is reducible: {0}")]
    ReduciblePi(String),

    #[error("indeterminate valuation: operand is zero to precision {0}")]
    IndeterminateValuation(i64),

    #[error("not a q-th power in the unramified model: nonzero digit at exponent {0}")]
    NotQthPower(i64),

    #[error("no unramified solution: argument has negative valuation {0}")]
    NoUnramifiedSolution(i64),

    #[error("outside disk of convergence: valuation {0} < 1")]
    OutsideDisk(i64),

    #[error("argument outside the closed unit disk: valuation {0} < 0")]
    OutsideUnitDisk(i64),

    #[error("branch index {index} out of range at step {step} (only {count} roots)")]
    BranchOutOfRange { step: usize, index: usize, count: usize },

    #[error("polylog depth exceeded: need l_{needed}, built up to l_{built}; rebuild with larger n_max")]
    DepthExceeded { needed: usize, built: usize },

    #[error("digit outside F_q at exponent {0}")]
    NotBaseDigit(i64),

    #[error("operation requires pi = x")]
    RequiresPiX,

    #[error("malformed input: {0}")]
    Parse(String),
}
