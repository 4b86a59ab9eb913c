//! Rational paraunitary wavelet filters with modulation structure.
//!
//! Filters are parametrized as a product of decimated elementary unitary
//! factors applied to the elementary wavelet filter, evaluated pointwise,
//! realized in state space and checked on sampled circle points.

// `!(x < y)` is used deliberately so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod exec;
pub mod filters;
pub mod io;
pub mod matrix;
pub mod realization;
pub mod signal;

pub use error::{Error, Result};
pub use exec::Execution;
pub use filters::{Factor, FilterParameters};
pub use matrix::{CMatrix, C64};
pub use realization::Realization;
