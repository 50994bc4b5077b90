use thiserror::Error;

/// Errors produced by the library and surfaced by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("{0} is not a prime in [2, 2^31)")]
    NotPrime(u64),
    #[error("polynomials live in different rings")]
    MismatchedRing,
    #[error("{what} exceeds the configured cap of {cap}")]
    ResourceCapExceeded { what: String, cap: u64 },
    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    DimensionCapExceeded { dim: u128, cap: u64 },
    #[error("polynomial has a nonzero constant term (not in the maximal ideal)")]
    NotInMaximalIdeal,
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("chart index {index} out of range 1..={n}")]
    InvalidChartIndex { index: usize, n: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("corpus error: {0}")]
    Corpus(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::UnknownVariable(_)
            | Error::NotPrime(_)
            | Error::InvalidArgument(_)
            | Error::Corpus(_)
            | Error::Io(_) => 1,
            Error::MismatchedRing
            | Error::NotInMaximalIdeal
            | Error::ZeroPolynomial
            | Error::InvalidChartIndex { .. }
            | Error::Precondition(_) => 2,
            Error::ResourceCapExceeded { .. } | Error::DimensionCapExceeded { .. } => 3,
        }
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::NotPrime(_) => "NotPrime",
            Error::MismatchedRing => "MismatchedRing",
            Error::ResourceCapExceeded { .. } => "ResourceCapExceeded",
            Error::DimensionCapExceeded { .. } => "DimensionCapExceeded",
            Error::NotInMaximalIdeal => "NotInMaximalIdeal",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::InvalidChartIndex { .. } => "InvalidChartIndex",
            Error::Precondition(_) => "PreconditionViolation",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Corpus(_) => "CorpusError",
            Error::Io(_) => "IoError",
        }
    }

    pub(crate) fn cap(what: impl Into<String>, cap: u64) -> Self {
        Error::ResourceCapExceeded {
            what: what.into(),
            cap,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
