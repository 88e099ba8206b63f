use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile construction failed: {0}")]
    Construction(String),

    #[error("profile violates class condition: {0}")]
    ClassViolation(String),

    #[error("profile parameters do not match for blending: {0}")]
    ParameterMismatch(String),

    #[error("input does not decay at the window ends and no tail rate was declared ({side} end, |f| = {value:e})")]
    NonDecaying { side: &'static str, value: f64 },

    #[error("spectral parameter {mu} lies on the singular interval [0, {omega_inf}]")]
    SingularPotential { mu: f64, omega_inf: f64 },

    #[error("zero-norm test function")]
    ZeroNorm,

    #[error("grids are not compatible: {0}")]
    GridMismatch(String),

    #[error("no convergence under refinement: {history:?}")]
    NoConvergence { history: Vec<f64> },

    #[error("eigenvalue count changed under refinement ({coarse} vs {fine})")]
    UnstableCount { coarse: usize, fine: usize },

    #[error("window too small: a-priori tail bound {bound:e} exceeds {limit:e}")]
    WindowTooSmall { bound: f64, limit: f64 },

    #[error("degenerate limiting eigenfunction: |psi0(d)| = {0:e}")]
    DegenerateEigenfunction(f64),

    #[error("root finder failed: {0}")]
    RootNotFound(String),

    #[error("imaginary part collapsed toward the real axis (Im mu = {im:e})")]
    BoundaryApproach { im: f64 },

    #[error("eigenpair residual above tolerance: {0}")]
    Residual(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("phase tracking inconclusive: {0}")]
    Inconclusive(String),

    #[error("branch continuation failed at m = {m}: {reason}")]
    Continuation { m: f64, reason: String },

    #[error("crossing not bracketed: {0}")]
    NotBracketed(String),

    #[error("no admissible blend offset: {0}")]
    NoAdmissibleDelta(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for failures that come from bad inputs rather than numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidParameter(_)
            | Error::ClassViolation(_)
            | Error::ParameterMismatch(_)
            | Error::Construction(_)
            | Error::Json(_) => true,
            Error::Stage { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
