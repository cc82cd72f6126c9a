use std::path::PathBuf;

use crate::centro::SymmetryReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what} must have even length, got {len}")]
    OddLength { what: &'static str, len: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix must have positive dimensions, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("entry ({row}, {col}) is outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("matrix violates centrosymmetry: {0}")]
    Asymmetric(SymmetryReport),

    #[error("dense solve of a {rows}x{cols} matrix exceeds the size cap of {cap} entries")]
    SizeCap {
        rows: usize,
        cols: usize,
        cap: usize,
    },

    #[error("iterative solver diverged at iteration {iteration}: {detail}")]
    Diverged { iteration: usize, detail: String },

    #[error("matrix has no nonzero entries")]
    ZeroMatrix,

    #[error("split solve failed (antisymmetric branch: {}, symmetric branch: {})",
        .first.as_ref().map_or("ok".to_string(), |e| e.to_string()),
        .second.as_ref().map_or("ok".to_string(), |e| e.to_string()))]
    Branch {
        first: Option<Box<Error>>,
        second: Option<Box<Error>>,
    },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("ray has zero length")]
    DegenerateRay,

    #[error("no ray intersects the reconstruction region")]
    EmptyRaySet,

    #[error("invalid permutation: {0}")]
    Permutation(String),

    #[error("invalid index: {0}")]
    Index(String),

    #[error("{}:{line}: {msg}", .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{}: {source}", .path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn file(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Self + '_ {
        move |source| Error::File {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn parse(path: &std::path::Path, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }
}
