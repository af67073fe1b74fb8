use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate ({x}, {y}) outside the supported range |c| <= 2^30")]
    CoordinateOutOfRange { x: i64, y: i64 },

    #[error("degenerate segment: both endpoints are the same point")]
    DegenerateSegment,

    #[error("conflict predicate called on two identical segments")]
    IdenticalSegments,

    #[error("polygon is not simple: {0}")]
    NonSimplePolygon(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("conflict graph on {n} vertices needs {needed_bytes} bytes, cap is {cap_bytes} bytes")]
    Capacity {
        n: usize,
        needed_bytes: u64,
        cap_bytes: u64,
    },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("scoring error: {0}")]
    Score(String),

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
