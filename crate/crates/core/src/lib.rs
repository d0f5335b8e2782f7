//! Exact and floating-point calculus for finite-dimensional coalgebras
//! carrying conjugate-linear involutions, the positivity theory built on
//! their invariant integrals, and a rewriting engine for the standard
//! q-deformed 2x2 quantum group.

pub mod arith;
pub mod builders;
pub mod coalgebra;
pub mod error;
pub mod fourier;
pub mod hopf;
pub mod linalg;
mod numeric;

pub use arith::{Backend, Scalar, Tol};
pub use error::{Error, Result};
