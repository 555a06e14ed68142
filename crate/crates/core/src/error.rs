use thiserror::Error;

/// Errors produced by the approximation toolkit.
///
/// Every index carried by a variant is stored zero-based; the `Display`
/// implementation reports it one-based, which is how indices are written in
/// documents and on the command line.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("curve has {len} point(s), at least 2 are required")]
    TooShort { len: usize },

    #[error("point {} has dimension {found}, expected {expected}", .index + 1)]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("point {} has a non-finite coordinate", .index + 1)]
    NonFiniteCoordinate { index: usize },

    #[error("index {} is out of range for a curve of {len} points", .index + 1)]
    IndexOutOfRange { index: usize, len: usize },

    #[error("chord endpoints coincide at index {}", .index + 1)]
    DegenerateChord { index: usize },

    #[error("invalid approximation: {0}")]
    InvalidApproximation(String),

    #[error("fidelity undefined: reference error {e_min} with zero approximation error")]
    FidelityUndefined { e_min: f64 },

    #[error("reference error {e_min} exceeds approximation error {e}; reference is not optimal")]
    ReferenceNotOptimal { e_min: f64, e: f64 },

    #[error("brute-force search limited to N <= {max_n} and K <= {max_k}, got N = {n}, K = {k}")]
    TooLarge {
        n: usize,
        k: usize,
        max_n: usize,
        max_k: usize,
    },

    #[error("segment count {k} is infeasible for a curve of {n} points (need 1 <= K <= N-1)")]
    InfeasibleK { k: usize, n: usize },

    #[error("no {k}-segment path fits the corridor (band {band}) on a level of {level_size} vertices{}", level_suffix(*.level))]
    InfeasibleCorridor {
        k: usize,
        band: usize,
        level_size: usize,
        level: Option<usize>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("slope fit needs at least {needed} records with strictly increasing x, got {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("log-log fit requires positive values, got {0}")]
    NonPositiveValue(f64),

    #[error("repeated runs of {0} produced different outputs")]
    NonDeterministicRun(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("polyline {}: {source}", .polyline + 1)]
    InPolyline {
        polyline: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

fn level_suffix(level: Option<usize>) -> String {
    match level {
        Some(l) => format!(" (pyramid level {l})"),
        None => String::new(),
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
