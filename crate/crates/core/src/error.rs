use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("variable index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("enumeration cap exceeded: {what} ({actual} > {cap})")]
    CapExceeded { what: &'static str, actual: usize, cap: usize },

    #[error("threshold grid is empty: 8*delta = {eight_delta} exceeds tau/(4 s^2) = {bound}")]
    EmptyGrid { eight_delta: f64, bound: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cannot draw {requested} distinct monomials from a universe of {available}")]
    ImpossibleRequest { requested: usize, available: u128 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("parameters are computationally infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
