use std::path::PathBuf;

use thiserror::Error;

use crate::mesh::BoundaryTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("refinement level {level} exceeds the supported maximum {max}")]
    LevelTooLarge { level: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("no quadrature rule of degree {0} (supported: 1..=4)")]
    UnsupportedDegree(usize),

    #[error("boundary tag {0} does not occur in the mesh")]
    UnknownTag(BoundaryTag),

    #[error("conjugate gradients stalled after {iterations} iterations, relative residual {residual:.3e}")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("projection fixed point not reached after {iterations} iterations, last increment {increment:.3e}")]
    ProjectionDiverged { iterations: usize, increment: f64 },

    #[error("problem `{0}` has no exact solution attached")]
    MissingExactSolution(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("time level {step} (t = {time:.6}): {source}")]
    AtTimeLevel {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_time_level(self, step: usize, time: f64) -> Self {
        Error::AtTimeLevel {
            step,
            time,
            source: Box::new(self),
        }
    }
}
