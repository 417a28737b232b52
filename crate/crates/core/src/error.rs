//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::daycount::Date;

pub type Result<T> = std::result::Result<T, CdsError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CdsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("date ordering: {start} is after {end}")]
    DateOrder { start: Date, end: Date },

    #[error("negative time {0} (years)")]
    NegativeTime(f64),

    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),

    /// The risk-neutral PV range over the hazard clamp does not straddle the
    /// quoted targets.
    #[error(
        "assumption 1 violated at pillar {pillar}: PV over the hazard clamp spans \
         [{pv_inf:.10e}, {pv_sup:.10e}] but targets are bid {bid:.10e}, ask {ask:.10e}"
    )]
    Assumption1 {
        pillar: usize,
        pv_inf: f64,
        pv_sup: f64,
        bid: f64,
        ask: f64,
    },

    /// The distorted bid-ask spread cannot reach the quoted one for any
    /// admissible gamma.
    #[error(
        "assumption 2 violated at pillar {pillar}: target spread {target:.10e} \
         not attainable with gamma in (0, {gamma_max}] (max spread {max_spread:.10e}, lambda {lambda:.10e})"
    )]
    Assumption2 {
        pillar: usize,
        lambda: f64,
        target: f64,
        max_spread: f64,
        gamma_max: f64,
    },

    #[error("PV is not increasing in lambda at pillar {pillar} (lambda {lambda:.10e})")]
    NonMonotone { pillar: usize, lambda: f64 },

    #[error("sign condition fails at pillar {pillar}: F(lambda_b) = {f_low:.10e}, F(lambda_a) = {f_high:.10e}")]
    SignCondition {
        pillar: usize,
        f_low: f64,
        f_high: f64,
    },

    #[error("constraint bid < PV < ask violated at pillar {pillar}: {bid:.10e} < {pv:.10e} < {ask:.10e}")]
    ConstraintViolated {
        pillar: usize,
        bid: f64,
        pv: f64,
        ask: f64,
    },

    #[error("root finder: {0}")]
    Solver(String),
}

impl CdsError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CdsError::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: Option<usize>, msg: impl Into<String>) -> Self {
        CdsError::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the data.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            CdsError::Solver(_)
                | CdsError::SignCondition { .. }
                | CdsError::ConstraintViolated { .. }
        )
    }
}

impl From<std::io::Error> for CdsError {
    fn from(e: std::io::Error) -> Self {
        CdsError::Io(e.to_string())
    }
}

impl From<csv::Error> for CdsError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line() as usize);
        CdsError::Parse {
            line,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for CdsError {
    fn from(e: serde_json::Error) -> Self {
        CdsError::Parse {
            line: Some(e.line()),
            message: e.to_string(),
        }
    }
}
