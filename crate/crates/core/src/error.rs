use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("path is not strongly simple: {0}")]
    NotStronglySimple(String),

    #[error("invalid quad: {0}")]
    InvalidQuad(String),

    #[error("not a crossing: {0}")]
    NotACrossing(String),

    #[error("jordan split produced {components} components, expected 2")]
    JordanViolation { components: usize },

    #[error("annulus detectors disagree at center {center:?}, r={inner}, R={outer}")]
    DetectorDisagreement {
        center: (i32, i32),
        inner: u32,
        outer: u32,
    },

    #[error("region {0} does not fit in the sampled window")]
    OutsideWindow(String),

    #[error("kernel is not positive semidefinite on the window (after jitter {jitter:e})")]
    NotPositiveDefinite { jitter: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("{ties} Gaussian sample values were exactly zero")]
    SignTie { ties: usize },

    #[error("no sub-quad found: {0}")]
    NoSubQuad(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
