use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    Dimension {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("entry {value} at ({row}, {col}) outside [0, {max}]")]
    EntryRange {
        row: usize,
        col: usize,
        value: i64,
        max: i64,
    },

    #[error("unsupported cycle half-length g = {0} (expected 2, 3 or 4)")]
    UnsupportedGirth(usize),

    #[error("expanded matrix too large for brute force: {0} columns")]
    TooLarge(usize),

    #[error("census scaling produced a non-integer term for span {span}")]
    NonIntegerScaling { span: usize },

    #[error("projection collapsed row {row} to zero while its target is {target}")]
    DegenerateRow { row: usize, target: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown fixture case `{0}`")]
    UnknownCase(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
