use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("distribution sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("reference policy entry {value} at (n={n}, x={x}, a={a}) is below the support floor")]
    ZeroSupportReference { n: usize, x: usize, a: usize, value: f64 },

    #[error("non-finite gradient entry at parameter {index}")]
    NonFiniteGradient { index: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("map parse error on line {line}: {reason}")]
    MapParse { line: usize, reason: String },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("configuration error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn shape_err(what: impl Into<String>) -> Error {
    Error::ShapeMismatch(what.into())
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
