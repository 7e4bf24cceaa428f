use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("{which} quadrilateral is not simple")]
    NotSimple { which: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("invalid RoI [{x0}, {y0}, {x1}, {y1}]: needs finite bounds with positive width and height")]
    InvalidRoi { x0: f64, y0: f64, x1: f64, y1: f64 },
    #[error("bin count must be at least 2, got {0}")]
    BinCount(usize),
    #[error("not a permutation of 1..=4: {0:?}")]
    InvalidPermutation([u8; 4]),
    #[error("match type index {0} out of range 0..24")]
    MatchIndex(usize),
    #[error("match type string {0:?} is not a permutation of \"1234\"")]
    MatchString(String),
    #[error("bin {bin} out of range for {bins} bins")]
    BinOutOfRange { bin: usize, bins: usize },
    #[error("{what} has length {got}, expected {expected}")]
    Length { what: &'static str, got: usize, expected: usize },
    #[error("{what} is not a valid distribution: {reason}")]
    Distribution { what: &'static str, reason: String },
    #[error("quadrilateral has non-finite coordinates")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("gamma must lie in [0, 2], got {0}")]
    Gamma(f64),
    #[error("window {window} must be in 1..={len}")]
    Window { window: usize, len: usize },
    #[error("score {0} outside [0, 1]")]
    Score(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuppressionError {
    #[error("reference detection has zero area; OKS scale undefined")]
    ZeroScale,
    #[error("threshold must lie in [0, 1], got {0}")]
    Threshold(f64),
}

/// Errors raised while reading or writing the text/JSON file formats.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
}

/// Any failure of the decode-to-evaluation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Suppression(#[from] SuppressionError),
    #[error("invalid configuration: {0}")]
    Config(String),
}
