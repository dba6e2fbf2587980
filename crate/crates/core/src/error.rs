use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Coupling outside the weak-coupling regime the pipeline is validated for.
    #[error("coupling lambda = {0} is outside the validated regime (< 0.5)")]
    CouplingOutOfRegime(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of the form factor at w = {0}")]
    FormFactorPole(Complex64),
    #[error("quadrature tolerance not met: estimated error {achieved:e}, requested {requested:e}")]
    QuadratureTolerance { achieved: f64, requested: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("root {z} converged outside the basin |z - w1| < 1 around w1 = {omega1}")]
    WrongBasin { z: Complex64, omega1: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("sampled functions live on different grids")]
    GridMismatch,
    #[error("missing constituent: {0}")]
    MissingConstituent(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("position x = {x} lies outside the box |x| <= {half_width}")]
    OutOfBox { x: f64, half_width: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
