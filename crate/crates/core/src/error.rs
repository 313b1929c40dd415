use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:.3e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix is near-singular: smallest eigenvalue {smallest:.3e}, largest {largest:.3e}")]
    NearSingular { smallest: f64, largest: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("invalid second-order description: {0}")]
    InvalidSecondOrder(String),

    #[error("design matrix is rank deficient (singular value ratio {ratio:.3e})")]
    RankDeficientDesign { ratio: f64 },

    #[error("decomposition is only defined on the active branch (l_G = {l_g}, k/2 = {half_k})")]
    InactiveBranch { l_g: f64, half_k: f64 },

    #[error("coefficient of determination must lie in [0, 1), got {0}")]
    InvalidR2(f64),

    #[error("AICc undefined for M = {n_samples} <= d + 1 = {}", dim + 1)]
    SmallSample { n_samples: usize, dim: usize },

    #[error("no candidate order can be scored")]
    EmptyCandidateSet,

    #[error("too few samples: got {got}, need {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("sample covariance is singular (smallest eigenvalue {smallest:.3e}); need more samples than dimensions (M = {n_samples}, N = {n_dim})")]
    SingularCovariance {
        smallest: f64,
        n_samples: usize,
        n_dim: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("format error at line {line}: {message}")]
    Format { line: u64, message: String },

    #[error("trial failed (true k = {true_k}, trial {trial_index}): {source}")]
    Trial {
        true_k: usize,
        trial_index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Broad failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numerical,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) | Error::Format { .. } => {
                ErrorClass::Config
            }
            Error::Io(_) => ErrorClass::Io,
            Error::Trial { source, .. } => source.class(),
            _ => ErrorClass::Numerical,
        }
    }

    /// Process exit code: 2 config, 3 numerical, 4 IO.
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Io => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
