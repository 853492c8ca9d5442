//! Desensitize labeled datasets by projecting them onto the privacy-noise
//! subspace of ridge discriminant component analysis, then measure the
//! resulting privacy/utility classification tradeoff.
//!
//! The crate is organized as five layers:
//!
//! * [`numerics`] — dense matrix kernels (multiply, Cholesky, triangular
//!   solves, symmetric Jacobi eigensolver) with explicit tolerance and
//!   determinism contracts.
//! * [`data`] — loaders for the HAR, CMU Faces and Semeion datasets, label
//!   construction, stratified splitting, and the random-guess baseline.
//! * [`rdca`] — scatter matrices, the ridge-regularized discriminant fit,
//!   signal/noise subspace extraction and projection, model persistence.
//! * [`classifier`] — one-vs-rest linear SVM trained by dual coordinate
//!   descent, plus stratified cross-validation over a (C, rho) grid.
//! * [`experiments`] — the end-to-end pipeline reproducing the five
//!   privacy/utility experiments and emitting report tables.

// index loops over matrix entries are the house style here
#![allow(clippy::needless_range_loop)]

pub mod classifier;
pub mod data;
mod error;
pub mod experiments;
pub(crate) mod model_io;
pub mod numerics;
pub(crate) mod parallel;
pub mod rdca;

pub use error::{Error, ErrorCategory, Result};
pub use numerics::Matrix;
