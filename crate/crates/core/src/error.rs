use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A located zero with vanishing slope. True profiles never touch zero
    /// tangentially, so this points at bad parameters or tolerances.
    #[error("tangential zero at s = {at} (|f'| = {slope:e})")]
    Tangency { at: f64, slope: f64 },

    #[error("step size underflow at {at}")]
    StepUnderflow { at: f64 },

    /// Homogeneity below the range where the shot from infinity is known to
    /// produce a zero.
    #[error("alpha = {alpha} is below the supported threshold {threshold} for N = {dimension}")]
    Unsupported {
        alpha: f64,
        dimension: u32,
        threshold: f64,
    },

    /// The requested zero does not exist before the horizon or zero budget.
    #[error("zero #{k} not found ({reason})")]
    Absent { k: usize, reason: String },

    #[error("no sign change of the matching residual in [{lo}, {hi}]")]
    BracketExhausted { lo: f64, hi: f64 },

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("explicit scheme became unstable at t = {at}")]
    Unstable { at: f64 },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
