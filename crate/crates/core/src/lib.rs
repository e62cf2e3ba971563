//! Operator norms of multivariate homogeneous polynomials.
//!
//! The crate computes the Schur-Agler norm, its dual norm, weak-product and
//! supremum norms of homogeneous polynomials on the polydisc by semidefinite
//! programming over a graded cone of positive operators, constructs
//! Hankel-based upper bounds for the dual norm together with machine-checkable
//! cone certificates, and verifies the classical counterexamples to the
//! von Neumann inequality in exact rational arithmetic.
//!
//! Module map:
//! - [`poly`]: multi-indices, the monomial basis, sparse homogeneous
//!   polynomials over exact rationals or complex floats, parsing, and the
//!   named polynomial families.
//! - [`linops`]: shift matrices, compressions, Hankel blocks and the derived
//!   constants `A_k`, `B_k`, `C_k`.
//! - [`sdp`]: the block-structured SDP model and the solver contract.
//! - [`norms`]: the norms as optimization problems plus a randomized
//!   lower-bound oracle and tuple evaluation.
//! - [`bounds`]: the five constructive bound methods with certificates.
//! - [`certify`]: graded-operator certificates, exact verification, the
//!   counterexample fixtures and the combinatorial family constructor.

pub mod bounds;
pub mod certify;
mod error;
pub mod linops;
pub mod mat;
pub mod norms;
pub mod poly;
pub mod scalar;
pub mod sdp;

pub use error::{Error, Result};
pub use poly::{ExactPoly, FloatPoly, HomogeneousPolynomial, MultiIndex};
pub use scalar::GaussRat;
