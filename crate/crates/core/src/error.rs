use thiserror::Error;

/// Errors raised by grid construction, transforms, solvers and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("n_theta = {0} is not a power of two >= 8; angular transforms need radix-2 FFT sizes")]
    InvalidThetaCount(usize),

    #[error("n_r = {0} is too small (need at least 4 radial nodes)")]
    InvalidRadialCount(usize),

    #[error("radius {0} is not a node radius of the grid")]
    OffGridRadius(f64),

    #[error("angle {0} is not a node angle of the grid")]
    OffGridAngle(f64),

    #[error("masked or non-finite value encountered in {0}")]
    Masked(&'static str),

    #[error("cone at boundary node {node} contains no interior grid node (gamma = {gamma}); use a finer grid")]
    EmptyCone { node: usize, gamma: f64 },

    #[error("{0} must be real-valued")]
    NonReal(&'static str),

    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),

    #[error("{0} vanishes identically")]
    ZeroFunction(&'static str),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last increment {last:.3e}, damping {damping})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        damping: f64,
        history: Vec<f64>,
    },

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
