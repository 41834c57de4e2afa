use thiserror::Error;

/// Errors raised by the rate, certification and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} exceeds tolerance)")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {smallest:e})")]
    NotPositiveDefinite { smallest: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no admissible twist parameter: delta {delta} is not below delta_star {delta_star}")]
    EmptyFeasibleSet { delta: f64, delta_star: f64 },

    #[error("no feasible (delta, lambda) pair for mode s = {s}")]
    InfeasibleMode { s: f64 },

    #[error("matrix has a defective eigenvalue {value}")]
    DefectiveMatrix { value: String },

    #[error("matrix has a zero eigenvalue; the kernel mode must be treated separately")]
    ZeroEigenvalue,

    #[error("deformation family {family} is not admissible for xi = {xi}, sigma = {sigma}: {reason}")]
    FamilyDomain {
        family: String,
        xi: f64,
        sigma: f64,
        reason: String,
    },

    #[error("certificate violated: smallest residual eigenvalue {residual:e}")]
    CertificateViolation { residual: f64 },

    #[error("sigma = {sigma} makes the slowest Fourier modes defective; supply an epsilon policy")]
    DefectiveSigma { sigma: f64 },

    #[error("theta = {theta} is outside (0, 2)")]
    ThetaOutOfRange { theta: f64 },

    #[error("rate function is not non-decreasing near s = {s}")]
    NonMonotoneRate { s: f64 },

    #[error("{name} = {value} is outside its admissible range {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("epsilon = {eps} must lie in (0, {limit})")]
    EpsTooLarge { eps: f64, limit: f64 },

    #[error("the {0} domain is not supported by this operation")]
    UnsupportedDomain(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
