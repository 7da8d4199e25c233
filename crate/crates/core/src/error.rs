use num_complex::Complex64;
use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ODE integration hit the step limit ({steps} steps) near {at}")]
    StepLimitExceeded { steps: usize, at: Complex64 },
    #[error("ODE state became non-finite near {at}")]
    NonFiniteState { at: Complex64 },
    #[error("quadrature needed more than {intervals} subintervals (error estimate {estimate:e})")]
    SubdivisionLimit { intervals: usize, estimate: f64 },
    #[error("division by a quantity of size {size:e} at z = {z}")]
    DivisionNearZero { z: Complex64, size: f64 },
    #[error("no sign change on the bracket [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("profile needs at least one exponential term")]
    EmptySpec,
    #[error("profile term {index} has non-positive coefficient (a = {a}, b = {b})")]
    NonPositiveCoefficient { index: usize, a: f64, b: f64 },
    #[error("Newton iteration failed to converge after {iterations} iterations (|residual| = {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },
    #[error("Riccati variable blew up near y = {at}")]
    RiccatiBlowup { at: Complex64 },
    #[error("series coefficients are not summable at radius {radius}")]
    RadiusTooLarge { radius: f64 },
    #[error("U'' vanishes at the critical layer; the local inversion is undefined")]
    DegenerateCriticalLayer,
    #[error("evaluation too close to the critical layer at y = {y}")]
    CriticalLayerSingularity { y: Complex64 },
    #[error("U - c vanishes inside the segment from the critical layer to {y}")]
    BranchAmbiguity { y: Complex64 },
    #[error("argument magnitude {value} exceeds the supported range {limit}")]
    ArgumentOutOfRange { value: f64, limit: f64 },
    #[error("damped Newton could not reduce the residual near c = {c}")]
    OutOfBasin { c: Complex64 },
    #[error("branch continuation broke at alpha = {alpha} after {solved} points")]
    BranchBreak { alpha: f64, solved: usize },
    #[error("no unstable window found for nu = {nu:e}")]
    WindowNotFound { nu: f64 },
    #[error("shooting step size collapsed near y = {at}")]
    StiffnessFailure { at: f64 },
    #[error("banded solve hit a zero pivot in column {column}")]
    SingularSolve { column: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("profile json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
