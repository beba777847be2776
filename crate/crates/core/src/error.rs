use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("operator is not Hermitian: max |H - H^dagger| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("operator is not unitary: max |U^dagger U - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized: squared norm = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("singular Gram matrix: dimension {n} is smaller than degree {q}")]
    SingularGram { q: usize, n: usize },

    #[error("eigendecomposition did not converge")]
    EigenNoConvergence,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
