use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e}, frobenius norm {frobenius:e})")]
    EigNoConvergence {
        sweeps: usize,
        off_norm: f64,
        frobenius: f64,
    },

    #[error("degenerate energy beamforming problem: {0}")]
    DegenerateProblem(String),

    #[error("SDP solver stopped after {iterations} iterations: gap {gap:e}, primal infeasibility {primal_infeasibility:e}, dual infeasibility {dual_infeasibility:e}")]
    SolverFailure {
        iterations: usize,
        gap: f64,
        primal_infeasibility: f64,
        dual_infeasibility: f64,
        /// Primal objective of the last iterate (normalized units).
        last_objective: f64,
    },

    #[error("empty time-sharing schedule")]
    EmptySchedule,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn dims(op: &'static str, expected: impl ToString, got: impl ToString) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
