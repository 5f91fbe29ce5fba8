use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (max |m_ij - conj(m_ji)| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace} (deviation {deviation:.3e} from 1)")]
    TraceNotOne { trace: f64, deviation: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("state vector has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("site subset is empty")]
    EmptySubset,

    #[error("site {site} out of range for {n_sites} subsystems")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("observable family is ragged: site {site} has {found} observables, expected {expected}")]
    RaggedFamily {
        site: usize,
        expected: usize,
        found: usize,
    },

    #[error("commutator bound needs exactly 2 observables per site, family has {0}")]
    CommutatorNeedsPair(usize),

    #[error("bound violated on subset {subset:?}: radicand {radicand:.3e} < 0")]
    UnsoundBound { subset: Vec<usize>, radicand: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("malformed input at `{path}`: {message}")]
    Malformed { path: String, message: String },
}

impl Error {
    pub(crate) fn malformed(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            message: message.into(),
        }
    }
}
