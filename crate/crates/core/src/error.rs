use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The CLI maps these onto its stable exit codes through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("elements or backends do not match")]
    BackendMismatch,

    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),

    #[error("invalid action map: {0}")]
    InvalidAction(String),

    #[error("invalid backend parameters: {0}")]
    InvalidParameters(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("cannot parse element: {0}")]
    Parse(String),

    #[error("element is outside the length table (radius {radius})")]
    OutOfTable { radius: usize },

    #[error("memory budget of {budget} bytes exceeded; completed radius {reached}")]
    BudgetExceeded { budget: u64, reached: usize },

    #[error("growth series too short: {nonzero} nonzero entries at l ≥ 2, need {required}")]
    SeriesTooShort { nonzero: usize, required: usize },

    #[error("cache fingerprint does not match the backend")]
    FingerprintMismatch,

    #[error("cache checksum mismatch (corrupt or truncated file)")]
    Checksum,

    #[error("cache format error: {0}")]
    CacheFormat(String),

    #[error("operation not supported for this backend: {0}")]
    Unsupported(String),

    #[error("no class element of length {requested}; nearest available length {nearest:?}")]
    NoClassElement {
        requested: usize,
        nearest: Option<usize>,
    },

    #[error("conjugacy class is finite (size {size}); it supports a class-indicator trace")]
    FiniteClass { size: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("class has no elements of length {0}")]
    EmptySphere(usize),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable process exit code: 2 budget, 3 configuration, 4 wrong regime,
    /// 5 insufficient data, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 2,
            Error::InvalidTable(_)
            | Error::InvalidAction(_)
            | Error::InvalidParameters(_)
            | Error::UnknownPreset(_)
            | Error::Parse(_)
            | Error::Config(_)
            | Error::InvalidArgument(_) => 3,
            Error::FiniteClass { .. } | Error::Unsupported(_) => 4,
            Error::SeriesTooShort { .. }
            | Error::InsufficientData(_)
            | Error::NoClassElement { .. }
            | Error::EmptySphere(_) => 5,
            _ => 1,
        }
    }
}
