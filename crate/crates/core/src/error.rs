use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("operator is not Hermitian: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("eigensolver failed on a {dim}x{dim} matrix (max entry {norm:.3e}): {message}")]
    Eigensolver { dim: usize, norm: f64, message: String },

    #[error("ambiguous Bohr frequency clustering: clusters {a} and {b} closer than twice the tolerance {tol:.3e}")]
    AmbiguousClustering { a: f64, b: f64, tol: f64 },

    #[error("invalid spectral density: {0}")]
    InvalidSpectralDensity(String),

    #[error("quadrature did not converge ({context}); estimated error {error:.3e}")]
    Quadrature { context: String, error: f64 },

    #[error("gamma matrix not positive semidefinite at omega = {omega}: min eigenvalue {min_eig:.3e}")]
    NotPositive { omega: f64, min_eig: f64 },

    #[error("Lamb shift does not commute with H_S: residual {residual:.3e}")]
    LambShiftCommutator { residual: f64 },

    #[error("generator is near-defective: eigenvector condition number {cond:.3e}")]
    NearDefective { cond: f64 },

    #[error("spectral invariant violated: {0}")]
    SpectralInvariant(String),

    #[error("no stationary state: smallest |lambda| = {0:.3e}")]
    NoSteadyState(f64),

    #[error("step size too large: {0}")]
    StepSize(String),

    #[error("root finder failed: {0}")]
    RootFinding(String),

    #[error("missing low-frequency law for the spectral density")]
    MissingLowFrequencyLaw,

    #[error("history buffer exceeds cap: {steps} steps > {cap}")]
    HistoryCap { steps: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
