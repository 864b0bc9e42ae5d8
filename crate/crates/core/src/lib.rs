// SPDX-License-Identifier: Apache-2.0

//! Group-covariant quantum observables on finite-dimensional Hilbert spaces,
//! with tools to decide informational completeness for pure states.

pub mod error;
pub mod exec;
pub mod group;
pub mod io;
pub mod linalg;
pub mod povm;
pub mod cli;
pub mod constructions;
pub mod rep;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
