use std::io;

use ariel_core::adapter::AdapterError;
use ariel_core::codec::CodecError;
use ariel_core::dataset::DatasetError;
use ariel_core::eval::EvalError;
use ariel_core::vector::VectorParseError;
use ariel_core::{ErrorCode, GrammarError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error("line {line}: {source}")]
    Vector { line: usize, source: VectorParseError },
    #[error("{path}: {source}")]
    File { path: String, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
}

impl ErrorCode for CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Grammar(e) => e.code(),
            CliError::Codec(e) => e.code(),
            CliError::Dataset(e) => e.code(),
            CliError::Eval(e) => e.code(),
            CliError::Adapter(e) => e.code(),
            CliError::Vector { source, .. } => source.code(),
            CliError::File { .. } | CliError::Io(_) => "E_IO",
            CliError::Usage(_) => "E_USAGE",
        }
    }
}

impl CliError {
    pub fn is_broken_pipe(&self) -> bool {
        matches!(self, CliError::Io(e) if e.kind() == io::ErrorKind::BrokenPipe)
    }
}
