use thiserror::Error;

/// Everything that can go wrong while building models or evaluating them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid order-size distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid arrival-rate specification: {0}")]
    InvalidArrivals(String),

    #[error("demand elasticity must be a finite number greater than 1, got {0}")]
    InvalidElasticity(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: String,
    },

    #[error("inventory level {index} is beyond the computed table (max {max})")]
    OutOfRange { index: i64, max: usize },

    #[error(
        "root finder failed at n = {n} after {iterations} iterations, last bracket [{lo:e}, {hi:e}]"
    )]
    Solver {
        n: usize,
        lo: f64,
        hi: f64,
        iterations: usize,
    },

    #[error("models are not comparable: {0}")]
    NotComparable(String),

    #[error("parameter mismatch: {0}")]
    Mismatch(String),

    #[error(
        "closed-form and direct relative differences disagree at n = {n}: {closed} vs {direct}"
    )]
    PathMismatch { n: usize, closed: f64, direct: f64 },
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Solver { .. } | Error::PathMismatch { .. })
    }

    pub(crate) fn domain(name: &'static str, value: f64, domain: impl Into<String>) -> Self {
        Error::Domain {
            name,
            value,
            domain: domain.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
