use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// No Bogoliubov diagonalization exists (|m| <= |n|, or the
    /// equivalent condition on the mean-field coefficients).
    #[error("unstable regime: |m| = {m_abs:e} <= |n| = {n_abs:e}")]
    UnstableRegime { m_abs: f64, n_abs: f64 },

    #[error("su(1,1) factorization breaks down (denominator {denominator:e})")]
    DegenerateFactorization { denominator: f64 },

    #[error("Fock truncation too small: {weight:e} of the norm sits in the top two levels")]
    TruncationOverflow { weight: f64 },

    #[error("unphysical covariance matrix: {0}")]
    UnphysicalCovariance(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Process exit code for the CLI: 1 for configuration problems, 2 for
    /// numerical or physicality failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
