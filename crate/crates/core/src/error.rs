use std::fmt;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One rejected input row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowDiagnostic {
    pub file: String,
    /// 1-based line number, header included.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for RowDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: malformed delimited data: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },
    #[error("{file}: missing column `{column}`")]
    MissingColumn { file: String, column: String },
    #[error("{} rejected row(s):\n{}", .0.len(), format_rows(.0))]
    InvalidRows(Vec<RowDiagnostic>),
    #[error("unknown references: workers [{}], tasks [{}]", .workers.join(", "), .tasks.join(", "))]
    UnknownReferences { workers: Vec<String>, tasks: Vec<String> },
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("checksum mismatch: stored {stored}, computed {computed}")]
    Checksum { stored: String, computed: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("modularity undefined for m=0")]
    EmptyGraph,
    #[error("edgeless worker network: no two active workers registered for a common task")]
    EdgelessNetwork,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown worker `{0}`")]
    UnknownWorker(String),
    #[error("negative rating {0}")]
    NegativeRating(f64),
    #[error("insufficient observations: {0}")]
    InsufficientObservations(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("continued fraction failed to converge for a={a}, b={b}, x={x}")]
    NoConvergence { a: f64, b: f64, x: f64 },
    #[error("artifact {path}: {message}")]
    Artifact { path: PathBuf, message: String },
}

fn format_rows(rows: &[RowDiagnostic]) -> String {
    rows.iter().map(|r| format!("  {r}")).collect::<Vec<_>>().join("\n")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for failures of the analysis itself, as opposed to bad input or usage.
    pub fn is_analysis_failure(&self) -> bool {
        matches!(
            self,
            Error::EmptyGraph
                | Error::EdgelessNetwork
                | Error::InsufficientObservations(_)
                | Error::NoConvergence { .. }
        )
    }
}
