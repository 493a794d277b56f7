use std::path::PathBuf;

use thiserror::Error;

/// Every failure the laboratory can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid gas parameters: {0}")]
    InvalidGas(String),

    #[error("non-physical state: v = {v}, theta = {theta}")]
    NonPhysicalState { v: f64, theta: f64 },

    #[error("Phi is undefined for z = {0} (requires z > 0)")]
    PhiDomain(f64),

    #[error("Lax admissibility violated: {0}")]
    LaxViolation(String),

    #[error("shock speed undefined: dp/dv = {0} is not negative")]
    UndefinedSpeed(f64),

    #[error("shock amplitude too large: partner temperature {0} is not positive")]
    AmplitudeTooLarge(f64),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("no admissible two-shock pattern connects the states: {0}")]
    NoAdmissiblePattern(String),

    #[error("degenerate shock: endpoints coincide")]
    DegenerateShock,

    #[error("endpoint stability inconsistent with the family: {0}")]
    WrongStability(String),

    #[error("no heteroclinic connection found: {0}")]
    NoConnection(String),

    #[error("profile residual {residual:e} exceeds tolerance {tol:e}")]
    ProfileResidual { residual: f64, tol: f64 },

    #[error("contact wave solver failed: {0}")]
    ContactFailed(String),

    #[error("contact domain too small: endpoint derivative {deriv:e} above {limit:e}")]
    ContactDomainTooSmall { deriv: f64, limit: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("positivity lost at node {node} (x = {x}), t = {t}: v = {v}, theta = {theta}")]
    PositivityLoss {
        node: usize,
        x: f64,
        t: f64,
        v: f64,
        theta: f64,
    },

    #[error("wave separation violated at t = {t}: left breakpoint {left} >= right breakpoint {right}")]
    SeparationViolated { t: f64, left: f64, right: f64 },

    #[error("state file: {0}")]
    StateFormat(String),

    #[error("state file version mismatch: file has version {found}, this build reads version {expected}")]
    StateVersion { found: u32, expected: u32 },

    #[error("config: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The error beneath any stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
