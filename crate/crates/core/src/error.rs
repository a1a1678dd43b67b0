use std::fmt;

use crate::lattice::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("contract violation: {0}")]
    Contract(Violation),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn contract(reason: impl Into<String>, witness: Option<Witness>) -> Self {
        Error::Contract(Violation {
            reason: reason.into(),
            witness,
        })
    }
}

/// Evidence that an oracle is not order-preserving: `x ⪯ y` but `f(x) ⋠ f(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub x: Point,
    pub fx: Point,
    pub y: Point,
    pub fy: Point,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f({}) = {} and f({}) = {}",
            self.x, self.fx, self.y, self.fy
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub reason: String,
    pub witness: Option<Witness>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            Some(w) => write!(f, "{} (witness: {})", self.reason, w),
            None => f.write_str(&self.reason),
        }
    }
}
