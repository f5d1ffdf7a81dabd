use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (only 2 and 3 are supported)")]
    UnsupportedDimension(usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("index {index} out of range for a ground set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("subset must be nonempty")]
    EmptySubset,

    #[error("input has no points")]
    EmptyInput,

    #[error("need at least {min} points, got {n}")]
    TooFewPoints { n: usize, min: usize },

    #[error("instance too large for brute force (n = {n}, limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("edge set does not connect the ground set")]
    Disconnected,

    #[error("rounding did not reduce the component count after {attempts} attempts")]
    RetriesExhausted { attempts: usize },

    #[error("support of the weighted solution is not planar: {0:?} crosses {1:?}")]
    NonPlanarSupport((usize, usize), (usize, usize)),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("operation requires a geometric range space with coordinates")]
    NotGeometric,

    #[error("shortcut cycle has crossing number {cycle} > 2 * {tree}")]
    ShortcutVerification { cycle: usize, tree: usize },

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("unsupported generator: {0}")]
    UnsupportedGenerator(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
