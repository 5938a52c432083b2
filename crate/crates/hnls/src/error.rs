use thiserror::Error;

/// Errors surfaced by the numerical pipeline.
///
/// The variants split into three families that the CLI maps onto exit codes:
/// configuration/schema problems, numerical-guard trips (the computation ran
/// but a health check failed), and validity-region violations (the requested
/// point lies outside the regime the formulas cover).
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid length {0} is not a power of two >= 8")]
    BadGridLength(usize),

    #[error("time step must be positive, got {0}")]
    BadTimeStep(f64),

    #[error("initial datum does not decay at the domain edges: |q| = {edge:.3e} exceeds {tol:.3e}")]
    NonDecayedDatum { edge: f64, tol: f64 },

    #[error("non-defocusing data: |r({z})| = {val} >= 1")]
    NonDefocusing { z: f64, val: f64 },

    #[error("quadrature did not converge: residual estimate {0:.3e}")]
    QuadratureNonConvergence(f64),

    #[error("ray xi = {xi} outside validity region (requires xi > {min_xi})")]
    InvalidRay { xi: f64, min_xi: f64 },

    #[error("degenerate stationary point at xi = 2/3 (double root z = 1/3)")]
    DegenerateRay,

    #[error("time {t} outside the trustworthy window (t_max = {t_max:.3})")]
    OutsideTrustWindow { t: f64, t_max: f64 },

    #[error("t = {t} below the asymptotic-regime minimum t_min = {t_min}")]
    BelowMinimumTime { t: f64, t_min: f64 },

    #[error("mass drift {drift:.3e} exceeded tolerance {tol:.3e} at t = {t}")]
    MassDrift { t: f64, drift: f64, tol: f64 },

    #[error("edge radiation guard tripped at t = {t}: |q(edge)| = {val:.3e} > {tol:.3e}")]
    EdgeRadiation { t: f64, val: f64, tol: f64 },

    #[error("stability guard: {0}")]
    StabilityGuard(String),

    #[error("requested point outside sector: {0}")]
    OutsideSector(String),

    #[error("t = {0} is not positive")]
    NonPositiveTime(f64),

    #[error("decay fit needs >= 5 positive values")]
    BadFitInput,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Config(_) | Json(_) => 2,
            InvalidRay { .. } | DegenerateRay | OutsideTrustWindow { .. } | OutsideSector(_)
            | NonPositiveTime(_) | BelowMinimumTime { .. } => 4,
            Io(_) => 1,
            _ => 3,
        }
    }
}
