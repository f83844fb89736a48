use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set size {0} outside the supported range 1..={max}", max = crate::sets::MAX_GROUND_SIZE)]
    GroundSetSize(usize),

    #[error("element index {index} out of range for ground set of size {n}")]
    ElementOutOfRange { index: usize, n: usize },

    #[error("labels must be {n} distinct strings, one per element")]
    BadLabels { n: usize },

    #[error("malformed family file: {0}")]
    Parse(String),

    #[error("probability {0} must lie strictly inside (0,1)")]
    ProbOutOfRange(f64),

    #[error("probability vector has {got} entries, ground set expects {want}")]
    ProbLength { got: usize, want: usize },

    #[error("family is trivial here: {0}")]
    TrivialFamily(&'static str),

    #[error("cap exceeded: {what} = {value} > {cap}; {hint}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("schedule entry L_{index} = {value} violates L >= 1")]
    ScheduleValue { index: usize, value: String },

    #[error("family must be 1-bounded, found a member of size {0}")]
    NotOneBounded(usize),

    #[error("amplification exponent {0} violates L >= 1")]
    BadExponent(f64),

    #[error("tail bound unavailable: {0}")]
    TailUnavailable(String),

    #[error("generator: {0}")]
    Generator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
