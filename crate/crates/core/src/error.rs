use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: element built for [{expected_min}, {expected_max}], circuit uses [{found_min}, {found_max}]")]
    GridMismatch {
        expected_min: i64,
        expected_max: i64,
        found_min: i64,
        found_max: i64,
    },

    #[error("bin {bin} lies outside the grid window [{n_min}, {n_max}]")]
    BinOutOfWindow { bin: i64, n_min: i64, n_max: i64 },

    #[error("invalid qubit mode map: {0}")]
    InvalidModeMap(String),

    #[error("circuit has no elements")]
    EmptyCircuit,

    #[error("fidelity is undefined for a transform with zero success probability")]
    UndefinedFidelity,

    #[error("parameter vector has length {found}, topology expects {expected}")]
    ParamLength { expected: usize, found: usize },

    #[error("invalid design problem: {0}")]
    InvalidProblem(String),

    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("squared moduli sum to {sum}, expected {expected}")]
    SimplexViolation { sum: f64, expected: f64 },

    #[error("log density is not finite at the initial point ({0})")]
    NonFiniteInit(f64),

    #[error("invalid sampler configuration: {0}")]
    InvalidSampler(String),

    #[error("invalid probe data: {0}")]
    InvalidProbe(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported format version {found} (reader supports {supported})")]
    FormatVersion { found: String, supported: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
