use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("contour quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    #[error("spike parameters too close for the distinct-parameter formula (separation {separation:e})")]
    ConfluentParameters { separation: f64 },

    #[error("discretization not converged: refinement changed the result by {change:e}")]
    NotConverged { change: f64 },

    #[error("linear system is singular: {0}")]
    SingularSystem(String),

    #[error("Hastings-McLeod boundary value problem did not converge after {iterations} Newton steps (last update {last_update:e})")]
    BvpNotConverged { iterations: usize, last_update: f64 },

    #[error("singular coefficient: |w u + u'| = {0:e}")]
    SingularCoefficient(f64),

    #[error("series did not converge: {0}")]
    SeriesNotConverged(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
