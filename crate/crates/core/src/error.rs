use thiserror::Error;

/// Errors produced by the samplers, the LP backend and the audit tools.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate simplex: scale {scale} must be positive")]
    DegenerateSimplex { scale: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("rescaling did not terminate after {steps} steps (last iterate {last:?})")]
    NonTermination { steps: usize, last: Vec<f64> },

    #[error(
        "sampling failed after {restarts} restarts ({accepted} accepted draws, estimated acceptance rate {acceptance_rate:.3e})"
    )]
    SamplingFailure {
        restarts: usize,
        accepted: usize,
        acceptance_rate: f64,
    },

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status for the command-line front end: 2 for bad input or
    /// an empty region, 3 for numerical trouble inside a sampler or solver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_)
            | Error::NonTermination { .. }
            | Error::SamplingFailure { .. }
            | Error::DegenerateSimplex { .. } => 3,
            _ => 2,
        }
    }
}
