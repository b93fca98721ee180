use std::fmt;

use thiserror::Error;

/// Which way a cost function blows up at an endpoint of the belief interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    PositiveInfinity,
    NegativeInfinity,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::PositiveInfinity => f.write_str("+inf"),
            Divergence::NegativeInfinity => f.write_str("-inf"),
        }
    }
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Inputs outside the model's domain.
    Domain,
    /// A numerical procedure failed on valid inputs.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("belief {value} outside [0, 1]")]
    BeliefOutOfRange { value: f64 },

    #[error("{name} = {value} must lie strictly inside (0, 1)")]
    NotInterior { name: &'static str, value: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("{0}")]
    ConditionViolated(String),

    #[error("derivative of order {order} of phi diverges to {direction} at x = {at}")]
    Divergent {
        at: f64,
        order: u8,
        direction: Divergence,
    },

    #[error("quadrature did not converge on [{lo}, {hi}]: achieved {achieved:e}, target {target:e}")]
    Quadrature {
        lo: f64,
        hi: f64,
        achieved: f64,
        target: f64,
    },

    #[error("{0}")]
    Numeric(String),

    #[error("at grid point {point}: {source}")]
    AtGridPoint {
        point: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::BeliefOutOfRange { .. }
            | Error::NotInterior { .. }
            | Error::Domain(_)
            | Error::ConditionViolated(_)
            | Error::Divergent { .. } => ErrorKind::Domain,
            Error::Quadrature { .. } | Error::Numeric(_) => ErrorKind::Numeric,
            Error::AtGridPoint { source, .. } => source.kind(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn at_point(self, point: f64) -> Self {
        Error::AtGridPoint {
            point,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
