//! Exact integer and rational linear algebra.
//!
//! Nothing in this crate touches floating point: matrices carry
//! arbitrary-precision integers or reduced rationals, and every normal form
//! records the unimodular transforms that produced it.

pub mod dec;
pub mod lattice;
pub mod matrix;
pub mod poly;

pub use lattice::{hnf, saturation_exponent, snf, IntLattice, IntVec, Snf};
pub use matrix::{
    elementary, elementary_rat, parse_int, parse_rat, rat_to_string, unit_rat, IntMatrix, Matrix,
    RatMatrix, Scalar,
};
pub use poly::{char_poly, companion, discriminant, local_annihilator, min_poly, Poly};
