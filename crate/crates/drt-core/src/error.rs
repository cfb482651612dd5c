//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid scene: {0}")]
    Invalid(String),
    #[error("duplicate object id '{0}'")]
    DuplicateId(String),
    #[error("unknown object '{0}'")]
    UnknownObject(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Why an analytic path prolongation is no longer valid at the requested
/// instant; any of these expires the path and asks for a trace refresh.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("interaction point left its {0}")]
    LeftGeometry(&'static str),
    #[error("segment {0} obstructed")]
    Obstructed(usize),
    #[error("terminal moved behind the reflecting plane")]
    BehindPlane,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("profile grids have different bin layouts")]
    GridLayoutMismatch,
    #[error("no snapshots to bin")]
    EmptyInput,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
