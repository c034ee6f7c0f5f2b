//! Crate-wide error type.

use crate::milp::Incumbent;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A file could not be parsed; carries the file name and 1-based line number.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Input data violates a structural invariant (duplicate ids, broken paths, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// No path exists between two stations.
    #[error("no path between {from} and {to}")]
    NoPath { from: String, to: String },

    /// A model or routing problem has no feasible solution.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The branch-and-bound node limit was reached before optimality was proven.
    /// Carries the best integer solution found so far, if any.
    #[error("node limit reached (best bound {bound})")]
    NodeLimit {
        incumbent: Option<Box<Incumbent>>,
        bound: f64,
    },

    /// The simplex method stalled or exceeded its iteration cap.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A routing result is too coarse for the requested capacity check level.
    #[error("level mismatch: routing at {have} level cannot serve a {want}-level check")]
    LevelMismatch { have: String, want: String },

    /// A line concept references lines that are not in the pool.
    #[error("concept/pool mismatch: {0}")]
    PoolMismatch(String),

    /// Too many OD pairs for extreme-scenario enumeration.
    #[error("too many uncertain OD pairs for scenario enumeration: {count} (limit {limit})")]
    TooManyPairs { count: usize, limit: usize },

    /// Expected-value evaluation needs scenario probabilities.
    #[error("scenario set carries no probabilities")]
    MissingProbabilities,

    /// The requested dissimilarity measure cannot be used in this context.
    #[error("unsupported measure: {0}")]
    UnsupportedMeasure(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// CSV layer failure not attributable to a specific record.
    #[error("csv: {0}")]
    Csv(String),

    /// JSON (de)serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
