//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wavenumber {0} is not admissible: need Im k >= 0 and k off the half-line (-inf, 0]")]
    InvalidWavenumber(num_complex::Complex64),
    #[error("argument lies on the branch cut (-inf, 0]")]
    BranchCut,
    #[error("evaluation point coincides with the singularity at the origin")]
    OriginSingularity,
    #[error("point is inside the near-boundary refusal band")]
    NearBoundary,
    #[error("node count {0} is odd; the quadrature rule needs an even count")]
    OddN(usize),
    #[error("node count {0} is below the minimum of 16 per curve")]
    GridTooCoarse(usize),
    #[error("curves are too close: min pairwise node distance {distance:.3e} <= 10 x node spacing {spacing:.3e}")]
    CurveTooClose { distance: f64, spacing: f64 },
    #[error("parametrization speed {speed:.3e} at t = {t:.6} is too small (cusp)")]
    CuspDetected { t: f64, speed: f64 },
    #[error("density length {got} does not match grid node count {expected}")]
    DensityLength { expected: usize, got: usize },
    #[error("density contains a non-finite value at index {0}")]
    NonFiniteDensity(usize),
    #[error("discrete system rank {rank} is below the predicted {expected}; the grid is under-resolved")]
    SingularGeometry { rank: usize, expected: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("unresolved dip near k = {0}; increase the sample count")]
    UnresolvedDip(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
