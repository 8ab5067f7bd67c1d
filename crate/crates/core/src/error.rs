use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site {site} out of range for {n_total} spins")]
    SiteOutOfRange { site: usize, n_total: usize },

    #[error("bath of {n} spins exceeds the oracle cap of {cap}")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (max deviation of U\u{2020}U from identity {0:e})")]
    NotUnitary(f64),

    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("density matrix has negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),

    #[error("operator dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("eigendecomposition failed: {0}")]
    Decomposition(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
