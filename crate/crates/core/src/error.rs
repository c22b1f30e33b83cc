use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("self-loop on node {0:?}")]
    SelfLoop(String),

    #[error("duplicate edge ({0:?}, {1:?})")]
    DuplicateEdge(String, String),

    #[error("edge ({0:?}, {1:?}) has nonpositive or non-finite weight {2}")]
    BadWeight(String, String, f64),

    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("no connected sample after {0} attempts; edge probability too small for connectivity")]
    RetriesExhausted(usize),

    #[error("graph has {n} nodes, above the dense eigensolver budget of {limit}")]
    DenseBudget { n: usize, limit: usize },

    #[error("symmetric eigensolver did not converge within {max_iter} iterations")]
    EigenNonConvergence { max_iter: usize },

    #[error("Krylov iteration stopped at dimension {dim} with relative residual {residual:e}")]
    KrylovNotConverged { dim: usize, residual: f64 },

    #[error("ODE integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("non-finite value encountered ({0})")]
    NonFinite(String),

    #[error("input contains NaN")]
    NaN,

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("series truncated at order {k}, below the first sign change k0 = {k0}; truncations this short have no positive root")]
    TruncationBelowSignChange { k: usize, k0: usize },

    #[error("walk-count difference sequence never changes sign up to order {0}")]
    NoSignChange(usize),

    #[error("zeta = {0} is not on the grid")]
    ZetaNotOnGrid(f64),

    #[error("window {0} is empty after filtering")]
    EmptyWindow(String),

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures caused by the input data or arguments rather than by
    /// a numerical routine running out of budget.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::RetriesExhausted(_)
                | Error::EigenNonConvergence { .. }
                | Error::KrylovNotConverged { .. }
                | Error::StepUnderflow { .. }
                | Error::DenseBudget { .. }
        )
    }
}
