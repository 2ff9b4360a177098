//! Command-line driver: file formats and the `solve`, `reduce`,
//! `reconstruct` and `check` commands.

// `!(x <= tol)` is used on purpose so NaN fails every tolerance check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod format;
