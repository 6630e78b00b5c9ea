//! Numerical analysis of pseudo-holomorphic functions on the unit disk.
//!
//! The crate discretizes the disk on a polar grid ([`grid`]) and provides the
//! Cauchy/Beurling family of area transforms ([`transforms`]), the similarity
//! factorization `w = e^s F` ([`similarity`]), fixed-point solvers for the
//! Beltrami-type boundary problems ([`solvers`]) and numerical probes of the
//! weight and oscillation inequalities that support them ([`diagnostics`]).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod similarity;
pub mod solvers;
pub mod transforms;

pub use error::{Error, Result};
pub use grid::{make_grid, BoundaryFunction, DiskGrid, GridFunction};
