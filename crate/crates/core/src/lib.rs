//! Discrete Euler-Poincaré field theory for SO(n)-valued fields on rectangular meshes.

// `!(x <= tol)` is used on purpose so NaN fails every tolerance check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connection;
pub mod error;
pub mod forms;
pub mod harmonic;
pub mod lie;
pub mod mesh;
pub mod noether;
pub mod par;
pub mod variational;

pub use error::{Error, Result};
