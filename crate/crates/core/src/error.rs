use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("non-finite entries in matrix input")]
    NonFiniteInput,

    #[error("non-physical moment matrix: {0}")]
    Physicality(String),

    #[error("task mismatch: {0}")]
    TaskMismatch(String),

    #[error("expectation value that must be real has imaginary part {imag:e} (real part {real:e})")]
    NotReal { real: f64, imag: f64 },

    #[error("bandwidth undefined for a zero-duration protocol")]
    UndefinedBandwidth,

    #[error("paths share no common duration grid")]
    GridMismatch,

    /// The objective or its gradient went non-finite at an accepted iterate.
    #[error("non-finite objective after {iterations} iterations")]
    NonFiniteObjective {
        last_finite: Vec<f64>,
        last_error: f64,
        iterations: usize,
    },
}
