use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced anywhere in the pipeline.
///
/// Variants are grouped by the exit-code class the CLI maps them to:
/// input problems (validation), caller mistakes (usage), and numerical
/// failures (internal).
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: missing required column `{column}`")]
    MissingColumn { column: String, line: usize },

    #[error("line {line}: duplicate entry ({concept}, {variety}, {form}) first seen on line {first_line}")]
    DuplicateRow {
        line: usize,
        first_line: usize,
        concept: String,
        variety: String,
        form: String,
    },

    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation {
        line: Option<usize>,
        message: String,
    },

    #[error("cannot tokenize `{form}` at char offset {offset}: {message}")]
    Tokenize {
        form: String,
        offset: usize,
        message: String,
    },

    #[error("`{form}` has no vowel nucleus")]
    NoNucleus { form: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("no {n}-grams extracted in mode {mode}")]
    DegenerateModel { n: usize, mode: String },

    #[error("cannot aggregate an empty NLL list")]
    EmptyAggregation,

    #[error("usage: {0}")]
    Usage(String),

    #[error(
        "one-class SVM did not converge after {iterations} iterations (duality gap {gap:.3e})"
    )]
    Convergence { iterations: usize, gap: f64 },

    #[error("evaluation: {0}")]
    Evaluation(String),
}

impl Error {
    pub(crate) fn validation(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Validation {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
