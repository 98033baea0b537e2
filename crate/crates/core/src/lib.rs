//! Exact combinatorics for the logarithmic decomposition formula.
//!
//! Cone complexes and their height-one slices, decorated tropical curves,
//! rigidity and multiplicities, basic monoids, and enhancement counts of
//! transverse pre-logarithmic maps. Every number is an arbitrary-precision
//! integer or rational.

#![no_std]

extern crate alloc;

pub mod complex;
pub mod curve;
pub mod enhance;
mod error;
pub mod lattice;
pub mod monoid;
pub mod tropmap;

#[cfg(test)]
mod testkit;

pub use error::{Error, Result};

pub use num_bigint::BigInt as Int;
pub use num_rational::BigRational as Rat;
