use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unsupported algebra dimension {0} (expected 1, 4 or 8)")]
    UnsupportedDimension(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid imaginary unit: {0}")]
    InvalidUnit(String),
    #[error("point ({x}, {y}) lies outside the domain")]
    Domain { x: f64, y: f64 },
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("stencil leaves the domain at ({x}, {y}) with step {h}")]
    Stencil { x: f64, y: f64, h: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("basis is not aligned with the point's imaginary unit")]
    Alignment,
    #[error("degenerate pair: the two imaginary units coincide")]
    DegeneratePair,
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("point is not on the manifold (residual {0:e})")]
    NotOnManifold(f64),
    #[error("pole at zero")]
    Pole,
    #[error("no continuous branch on the negative real axis (pass an explicit unit to override)")]
    Branch,
    #[error("missing partial derivatives")]
    Derivative,
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
