use thiserror::Error;

/// Errors while reading or writing files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("line {line}: expected {expected} values, found {found}")]
    ShortRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} data rows, found {found} (file truncated?)")]
    MissingRows { expected: usize, found: usize },
    #[error("line {line}, column {column}: cannot parse {text:?}")]
    BadValue {
        line: usize,
        column: usize,
        text: String,
    },
    #[error("cell centroid ({lat}, {lon}) outside [-90, 90] x [-180, 180)")]
    CoordinateOutOfRange { lat: f64, lon: f64 },
    #[error(transparent)]
    Model(#[from] geopspline_core::Error),
}
