use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count must be at least 2, got {0}")]
    ModeCountTooSmall(usize),

    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("mode pair ({0}, {1}) must use two distinct modes")]
    DegeneratePair(usize, usize),

    #[error("matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("transfer matrix is not unitary (max |UU^H - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("transfer matrix is not flagged lossless; refusing to evolve a state with it")]
    NotLossless,

    #[error("matrix is not Hermitian (max |A - A^H| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace:.17}, expected {expected}")]
    BadTrace { trace: f64, expected: f64 },

    #[error("matrix has negative eigenvalue {eigenvalue:.3e}")]
    NotPositive { eigenvalue: f64 },

    #[error("parameter {name} = {value} outside its valid range {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("post-selected sector has probability {0:.3e}; nothing to normalize")]
    EmptyPostSelection(f64),

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
