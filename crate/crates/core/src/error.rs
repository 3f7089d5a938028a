use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hypervolume supports 2 to 4 objectives, got {0}")]
    UnsupportedDimension(usize),

    #[error("point {point:?} lies outside the domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("generator unavailable: {0}")]
    GeneratorUnavailable(String),

    #[error("surrogate response rejected: {0}")]
    SurrogateResponse(String),

    #[error("run record sink failed: {0}")]
    Sink(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
