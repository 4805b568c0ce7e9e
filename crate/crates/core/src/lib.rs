//! Spectral functions of Toeplitz operators on the poly-Bergman type spaces
//! of the Siegel domain, and the algebraic checks built on them.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cli;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod specfun;
pub mod spectral;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::Matrix;
