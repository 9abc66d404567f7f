use std::fmt;

use crate::rates::Algorithm;

/// Half-open or closed step-size interval `]0, upper[` / `]0, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInterval {
    pub upper: f64,
    pub closed: bool,
}

impl StepInterval {
    pub fn unbounded() -> Self {
        StepInterval {
            upper: f64::INFINITY,
            closed: false,
        }
    }

    pub fn contains(&self, tau: f64) -> bool {
        if !(tau > 0.0) || tau.is_nan() {
            return false;
        }
        if self.closed {
            tau <= self.upper
        } else {
            tau < self.upper
        }
    }
}

impl fmt::Display for StepInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.upper.is_infinite() {
            write!(f, "]0, +inf[")
        } else if self.closed {
            write!(f, "]0, {}]", self.upper)
        } else {
            write!(f, "]0, {}[", self.upper)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("step-size {tau} outside the admissible interval {interval} of {algorithm}")]
    StepSize {
        algorithm: Algorithm,
        tau: f64,
        interval: StepInterval,
    },
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} has no finite optimal step-size for these parameters")]
    NoOptimum(Algorithm),
    #[error("iterate became non-finite at iteration {iteration}")]
    Divergence { iteration: usize },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("{0} does not expose a proximity operator")]
    ProxUnavailable(String),
    #[error("reference solution did not converge: residual {residual:e} after {iterations} iterations")]
    Reference { residual: f64, iterations: usize },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
