use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The continued fraction for I_p(a, b) did not converge.
    #[error("incomplete beta did not converge at a={a}, b={b}, p={p}")]
    BetaNonConvergence { a: f64, b: f64, p: f64 },
    /// A root finder, eigensolver or internal cross-check failed.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The requested object exceeds the size caps.
    #[error("resource limit: {0}")]
    Resource(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Numeric,
    Resource,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) => ErrorKind::Domain,
            Error::BetaNonConvergence { .. } | Error::Numeric(_) => ErrorKind::Numeric,
            Error::Resource(_) => ErrorKind::Resource,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}

macro_rules! numeric {
    ($($arg:tt)*) => { $crate::Error::Numeric(alloc::format!($($arg)*)) };
}

pub(crate) use {domain, numeric};
