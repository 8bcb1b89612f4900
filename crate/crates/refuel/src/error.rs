use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("job {id}: processing time must be a positive integer, got {p}")]
    BadProcessingTime { id: usize, p: u64 },

    #[error("job {id}: weight must be positive and finite, got {w}")]
    BadWeight { id: usize, w: f64 },

    #[error("job ids must be exactly 0..{n}")]
    BadIds { n: usize },

    #[error("order is not a permutation of the instance's job ids")]
    MalformedPermutation,

    #[error("window end {got} does not match start plus total processing time {expected}")]
    WindowMismatch { got: f64, expected: f64 },

    #[error("empty window has no phi-maximal job")]
    EmptyWindow,

    #[error(
        "instance has {n} jobs, above the size guard of {limit}; pass the override to proceed"
    )]
    SizeGuard { n: usize, limit: usize },

    #[error("instance has {n} jobs; subset states are limited to 64 jobs")]
    TooManyJobs { n: usize },

    #[error("solve exceeded its deadline")]
    Timeout,

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Manifest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
