//! Random-matrix laboratory for rectangular beta-Laguerre ensembles.
//!
//! Exact tridiagonal samplers for the beta-Hermite and beta-Laguerre
//! eigenvalue laws, the Laguerre-to-Hermite normalization and extreme
//! eigenvalue centerings, Tracy-Widom tables built from the Hastings-McLeod
//! solution of Painlevé II, large-deviation rate functions, and the
//! experiment harness behind the `rmtlab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ensembles;
pub mod harness;
pub mod ldp;
pub mod numerics;
pub mod scaling;
pub mod tracy_widom;

pub use error::{Error, Result};
