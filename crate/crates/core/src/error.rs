use thiserror::Error;

use crate::funcalc::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid coordinate pair ({i}, {j}): {reason}")]
    Index {
        i: usize,
        j: usize,
        reason: &'static str,
    },
    #[error("regularity violated: {0}")]
    Regularity(String),
    #[error("height bracket [{lo}, {hi}] is not inside the domain of the height function")]
    BracketOutsideDomain { lo: f64, hi: f64 },
    #[error("no sign change of the height equation on [{lo}, {hi}] (values {g_lo:e}, {g_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },
    #[error("height solve did not converge after {0} iterations")]
    NonConvergence(usize),
    #[error("point is off the surface: residual {residual:e} exceeds {tol:e}")]
    OffSurface { residual: f64, tol: f64 },
    #[error("vector is not tangent: |<v, N>| = {0:e}")]
    NotTangent(f64),
    #[error("degenerate plane section: |u ^ w| = {0:e}")]
    DegeneratePlane(f64),
    #[error("invalid family parameters: {0}")]
    Family(String),
    #[error("scan needs at least two regular samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for failures caused by the geometry at a particular point
    /// (root finding, regularity, evaluation outside a function's domain)
    /// rather than by malformed input.
    pub fn is_point_failure(&self) -> bool {
        matches!(
            self,
            Error::Eval(_)
                | Error::Regularity(_)
                | Error::NoSignChange { .. }
                | Error::NonConvergence(_)
                | Error::OffSurface { .. }
                | Error::NotTangent(_)
                | Error::DegeneratePlane(_)
                | Error::TooFewSamples(_)
        )
    }
}
