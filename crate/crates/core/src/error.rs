use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to be
/// reported verbatim by the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator of {value} does not divide conductor {conductor}")]
    ConductorMismatch { value: String, conductor: u64 },

    #[error("sieving requires integer exponents, series lives on lattice 1/{lattice}")]
    Lattice { lattice: u64 },

    #[error("invalid partition spec: {0}")]
    InvalidSpec(String),

    #[error("modulus {delta} does not divide level {level}")]
    Divisibility { delta: u64, level: u64 },

    #[error("({a}, {c}) is not a valid cusp: {reason}")]
    InvalidCusp { a: i64, c: i64, reason: String },

    #[error("operation needs a finite cusp (c > 0); the cusp at infinity is handled by the defining series")]
    CuspAtInfinity,

    #[error("{what} must be an integer, got {value}")]
    NotIntegral { what: &'static str, value: String },

    #[error("enumeration limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("both sign branches apply to part {ell} (g' = {g_prime} is self-conjugate modulo {modulus})")]
    AmbiguousBranch { ell: String, g_prime: i64, modulus: i64 },

    #[error("precision shortfall: need coefficients below q^{needed}, series is valid below q^{available}")]
    PrecisionShortfall { needed: String, available: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("checkpoint rejected: {0}")]
    Checkpoint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
