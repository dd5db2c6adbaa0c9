use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("matrix is not Hermitian (|M - M^dagger|_2 = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("power {exponent} of a singular state (lambda_min = {lambda_min:.3e})")]
    SingularPower { exponent: f64, lambda_min: f64 },

    #[error("logarithm of a singular state (lambda_min = {lambda_min:.3e})")]
    SingularLog { lambda_min: f64 },

    #[error("relative purity {value:.3e} is not positive")]
    NonPositivePurity { value: f64 },

    #[error("Renyi prefactor is singular (1 + (1 - alpha) ln lambda_min = {denominator:.3e})")]
    SingularPhi { denominator: f64 },

    #[error("operation requires a full-rank state (lambda_min = {lambda_min:.3e})")]
    RequiresFullRank { lambda_min: f64 },

    #[error("time horizon must be positive")]
    ZeroHorizon,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("Hamiltonian sample at t = {t} is not Hermitian")]
    NonHermitianSample { t: f64 },

    #[error("overlap {overlap:.3e} vanishes at t = {t}")]
    VanishingOverlap { t: f64, overlap: f64 },

    #[error("configuration: {0}")]
    Config(String),

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
