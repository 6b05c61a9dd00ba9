use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: fixed-form line is {len} characters long (limit 72)")]
    FixedLineTooLong { line: usize, len: usize },

    #[error("line contains a newline character")]
    EmbeddedNewline,

    #[error("line {line}: continuation line {reason}")]
    MisplacedContinuation { line: usize, reason: &'static str },

    #[error("not a code line")]
    NotCodeLine,

    #[error("unterminated nonnumeric literal starting at byte {offset}")]
    UnterminatedLiteral { offset: usize },

    #[error("unit has no PROCEDURE DIVISION")]
    NoProcedureDivision,

    #[error("expected a {expected} unit")]
    WrongUnitKind { expected: &'static str },

    #[error("unknown paragraph `{0}`")]
    UnknownParagraph(String),

    #[error("line {line}: continuation of a literal is not resumed by a quote")]
    MalformedContinuation { line: usize },

    #[error("line {line}: token of {len} characters cannot be split into fixed form")]
    UnsplittableLine { line: usize, len: usize },

    #[error("expected {expected:?} form input, got {actual:?}")]
    FormMismatch {
        expected: crate::model::SourceForm,
        actual: crate::model::SourceForm,
    },

    #[error("unknown perturbation method `{0}`")]
    UnknownMethod(String),

    #[error("method `{method}` can only be applied to whole programs")]
    ScopeViolation { method: String },

    #[error("method `{method}` needs {required} input")]
    FormViolation { method: String, required: &'static str },

    #[error("could not find a collision-free name for `{name}` after 30 tries")]
    RenameCollision { name: String },

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("layer {layer} (`{method}`) did not change its input")]
    LayerNoEffect { layer: usize, method: String },

    #[error("no syntactic method changes paragraph `{paragraph}` of `{program}`")]
    ExhaustedMethods { program: String, paragraph: String },

    #[error("translation failed: {0}")]
    Translation(String),

    #[error("metric id sets differ: {0}")]
    MetricSetMismatch(String),

    #[error("no input groups with at least one variant")]
    EmptyDataset,

    #[error("group {0} does not exist")]
    UnknownGroup(usize),

    #[error("{0}")]
    Manifest(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
