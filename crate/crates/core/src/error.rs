use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid shape {rows}x{cols} with {len} entries")]
    InvalidShape { rows: usize, cols: usize, len: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{op}: matrix must have at least as many rows as columns, got {rows}x{cols}")]
    NotTall {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not symmetric: max |a_ij - a_ji| = {max_asymmetry:e}")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("{op} did not converge after {sweeps} sweeps, off-diagonal norm {off_norm:e}")]
    NoConvergence {
        op: &'static str,
        sweeps: usize,
        off_norm: f64,
    },

    #[error("sample size l = {l} exceeds min(m, n) = {limit}")]
    OversampledRange { l: usize, limit: usize },

    #[error("sampled range is degenerate: achieved rank {achieved} < target rank {target}")]
    DegenerateRange { achieved: usize, target: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stochastic method requires a randomized SVD configuration")]
    MissingRsvdConfig,

    #[error("basis is not orthonormal: max |B^T B - I| = {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("all data points are identical; kernel bandwidth would be zero")]
    IdenticalPoints,

    #[error("row {row} of the kernel matrix has non-positive sum {sum:e}")]
    ZeroRowSum { row: usize, sum: f64 },

    #[error("invalid PGM magic {found:?} (expected P2 or P5)")]
    BadMagic { found: String },

    #[error("PGM header is malformed: {0}")]
    BadHeader(String),

    #[error("PGM maxval is zero")]
    ZeroMaxval,

    #[error("PGM maxval {0} exceeds 65535")]
    MaxvalTooLarge(u32),

    #[error("truncated PGM payload: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("PGM sample {value} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u32, maxval: u32 },

    #[error("{path}: {source}")]
    Frame {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("frame {name} is {found:?} but the sequence is {expected:?}")]
    FrameShape {
        name: String,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("no frames found in {0}")]
    EmptySequence(PathBuf),

    #[error("invalid container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_frame(self, path: impl Into<PathBuf>) -> Self {
        Error::Frame {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
