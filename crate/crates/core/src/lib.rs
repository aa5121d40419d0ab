//! Darboux (intertwining) transformations for the one-dimensional stationary
//! Dirac equation `(γ∂ₓ + V) ψ = E ψ` with `V = p σ₃ + q σ₁`.
//!
//! Functions carry exact derivatives as truncated Taylor jets, so every
//! operator identity (intertwining, factorization, determinant formulas) is
//! checked without finite differences.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod chain;
pub mod darboux;
pub mod error;
pub mod field;
pub mod grid;
pub mod jet;
pub mod linalg;
pub mod potential;
pub mod quad;
pub mod reduction;
pub mod special;
pub mod spinor;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Interval, ScalarField};
pub use jet::Jet;
pub use linalg::{Mat2, GAMMA};
pub use potential::{make_canonical, seed_catalog, ClassTag, Potential, Representation};
