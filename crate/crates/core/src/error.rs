use thiserror::Error;

use crate::clifford::AlgebraError;
use crate::contour::ContourError;
use crate::function::{ModelError, ParseError};
use crate::oracle::OracleError;
use crate::residue::ResidueError;
use crate::series::SeriesError;

/// Any failure from the library, tagged by the stage that produced it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl Error {
    /// Whether the input text itself was at fault, as opposed to a
    /// computation on a well-formed input.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Model(ModelError::Parse(_)))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
