// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::linalg::ComplexMatrix;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not a projective representation: {0}")]
    NotProjectiveRep(String),

    #[error("inconsistent result: {0}")]
    Inconsistency(String),

    /// Covariant seed whose orbit does not sum to the identity.
    #[error("not an observable: outcome operators sum to identity + deficit with ||deficit||_F = {norm:.3e}")]
    NotAnObservable { norm: f64, deficit: ComplexMatrix },

    #[error("precondition {condition} violated: {message}")]
    Precondition {
        condition: &'static str,
        message: String,
    },

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("dimension {d} is not tabulated; general bound is [{lower}, {upper}]")]
    UnknownDimension { d: usize, lower: usize, upper: usize },

    #[error("construction failed: {0}")]
    Construction(String),
}
