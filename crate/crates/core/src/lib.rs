//! Spectral-Galerkin simulation and verification for semilinear stochastic
//! evolution equations `dX = AX dt + L̃B(X) dt + G dW` whose generator splits
//! into 1×1 or 2×2 blocks.

// `!(x > 0.0)` is how parameter checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod dst;
pub mod engine;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod models;
pub mod quad;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
