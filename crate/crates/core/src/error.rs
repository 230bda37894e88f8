use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency module mismatch")]
    ModuleMismatch,

    #[error("expected {expected} coordinates, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("generators are linearly dependent over Q: relation {relation:?}")]
    DependentGenerators { relation: Vec<i64> },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),

    #[error("invalid number `{0}`")]
    InvalidNumber(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("support set must be symmetric and contain 0")]
    BadSupport,

    #[error("measure is not normalized: {0}")]
    NotNormalized(String),

    #[error("moments are not Hermitian at {0:?}")]
    NotHermitian(Vec<i64>),

    #[error("moment matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("missing moments for differences {0:?}")]
    MissingMoments(Vec<Vec<i64>>),

    #[error("negative density value {value:e} at {at:?}")]
    NegativeDensity { value: f64, at: Vec<f64> },

    #[error("infinite mass: density does not vanish outside its breakpoints")]
    InfiniteMass,

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ModuleMismatch => "module_mismatch",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DependentGenerators { .. } => "dependent_generators",
            Error::InvalidGenerator(_) => "invalid_generator",
            Error::UnknownSymbol(_) => "unknown_symbol",
            Error::InvalidNumber(_) => "invalid_number",
            Error::InvalidInput(_) => "invalid_input",
            Error::BadSupport => "bad_support",
            Error::NotNormalized(_) => "not_normalized",
            Error::NotHermitian(_) => "not_hermitian",
            Error::NotPositiveDefinite(_) => "not_positive_definite",
            Error::MissingMoments(_) => "missing_moments",
            Error::NegativeDensity { .. } => "negative_density",
            Error::InfiniteMass => "infinite_mass",
            Error::Syntax { .. } => "syntax",
            Error::Json(_) => "json",
        }
    }
}
