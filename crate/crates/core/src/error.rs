use std::path::PathBuf;

use thiserror::Error;

/// What went wrong while parsing, together with the byte offset.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Unexpected {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("second variable `{second}` at byte {offset}; expression already uses `{first}`")]
    MultipleVariables {
        offset: usize,
        first: String,
        second: String,
    },
    #[error("invalid number `{text}` at byte {offset}")]
    InvalidNumber { offset: usize, text: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Unexpected { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::MultipleVariables { offset, .. }
            | ParseError::InvalidNumber { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid interval [{lo}, {hi}]: endpoints must be finite with lo <= hi")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("function is undefined at x = {x}; the difference quotient has no base value")]
    UndefinedAtPoint { x: f64 },
    #[error("grid size must be at least 2, got {0}")]
    GridTooSmall(usize),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
