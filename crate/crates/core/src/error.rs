use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("permutations share the letter {0}")]
    DisjointnessViolation(u32),
    #[error("letter {0} occurs more than once")]
    RepeatedLetter(u32),
    #[error("letters must be positive integers")]
    ZeroLetter,
    #[error("window [{i}, {j}] out of range for a permutation of length {len}")]
    IndexOutOfRange { i: usize, j: usize, len: usize },
    #[error("cannot parse permutation {0:?}")]
    Parse(String),
    #[error("unknown statistic {0:?}")]
    UnknownStatistic(String),
    #[error("length {length} exceeds the table maximum {max_length}")]
    LengthOutOfRange { length: usize, max_length: usize },
    #[error("permutation {0} is not standard")]
    NotStandard(String),
    #[error("statistic {name} is not {property}")]
    IncompatibleStatistic { name: String, property: String },
    #[error("{fine} does not refine {coarse}")]
    NotARefinement { fine: String, coarse: String },
    #[error("{needed} variables needed, {given} given")]
    TooFewVariables { needed: usize, given: usize },
    #[error("polynomial is not quasisymmetric: {0}")]
    NotQuasisymmetric(String),
    #[error("infeasible class bound: {0}")]
    InfeasibleBound(String),
    #[error("table schema error: {0}")]
    Schema(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
