use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cost matrix has an empty dimension ({rows}x{cols})")]
    Dimension { rows: usize, cols: usize },

    #[error("cost entry at ({row}, {col}) is {value}; entries must be finite and nonnegative")]
    InvalidCost { row: usize, col: usize, value: f64 },

    #[error("cost matrix data has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },

    #[error("brute-force enumeration limited to {max} assignments per side, got {got}")]
    Size { max: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    Param { name: &'static str, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("cannot build a cost matrix with {tracks} tracks and {detections} detections")]
    Empty { tracks: usize, detections: usize },

    #[error("frame {frame} is not after the last processed frame {last}")]
    Order { frame: u64, last: u64 },

    #[error("detection for frame {found} passed to frame {expected}")]
    FrameMismatch { expected: u64, found: u64 },

    #[error("invalid scenario: {0}")]
    Spec(String),

    #[error("results are not aligned with ground truth: {0}")]
    Alignment(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Param {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
