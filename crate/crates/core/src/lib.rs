//! Exact computations with braided vector spaces of diagonal type: the
//! reflections `s_i`, Weyl-Brandt groupoid orbits, Weyl equivalence, and a
//! machine-checked catalog of the rank 2 equivalence classes.
//!
//! Scalars are roots of unity times monomials in formal transcendental
//! parameters, so every computation is exact.

pub mod braiding;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod groupoid;
pub mod matrix;
pub mod scalar;

pub use braiding::{BraidingMatrix, ReflectionData, TwistClass, TwistInvariants};
pub use error::{Error, Result};
pub use matrix::IntMatrix;
pub use scalar::{Order, Scalar};
