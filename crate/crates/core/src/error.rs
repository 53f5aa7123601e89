use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self loop ({u}, {v}, {weight})")]
    SelfLoop { u: usize, v: usize, weight: f64 },

    #[error("node index out of range in ({u}, {v}, {weight}); graph has {n} nodes")]
    OutOfRange { u: usize, v: usize, weight: f64, n: usize },

    #[error("duplicate edge ({u}, {v}, {weight})")]
    DuplicateEdge { u: usize, v: usize, weight: f64 },

    #[error("invalid edge weight in ({u}, {v}, {weight}); weights must be finite and nonnegative")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    #[error("edge ({0}, {1}) is already present")]
    EdgePresent(usize, usize),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("expected {expected} opinions, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("opinion vector is empty")]
    EmptyOpinions,

    #[error("opinion vector is identically zero")]
    ZeroOpinions,

    #[error("unknown dataset '{0}'")]
    UnknownDataset(String),

    #[error("unknown method '{0}'")]
    UnknownMethod(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph too large: {0}")]
    TooLarge(String),

    #[error("edge weight {0} is not an integer; exact forest counts need integer weights")]
    NonIntegerWeight(f64),

    #[error("katz alpha {alpha} does not converge; spectral radius of A is {radius}")]
    KatzDivergent { alpha: f64, radius: f64 },

    #[error("infeasible link addition: {0}")]
    Infeasible(String),

    #[error("conflict reduction optimum is zero; conflict awareness undefined")]
    DegenerateOptimum,

    #[error("insufficient {what}: need {need}, have {have}")]
    Insufficient { what: &'static str, need: usize, have: usize },

    #[error("candidate {index}: {source}")]
    Candidate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
